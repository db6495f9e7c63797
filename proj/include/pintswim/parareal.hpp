#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "pintswim/schedule_trace.hpp"

namespace pintswim::parareal {

/// Flat state vector; physics states are packed/unpacked by the caller so the
/// driver stays agnostic of what it integrates.
using Vec = std::vector<double>;

/// Advances a state over [t0, t1]. Must be deterministic: identical inputs
/// produce bitwise-identical outputs (the exactness and mode-equivalence
/// guarantees rest on this).
using PropagatorFn = std::function<Vec(double t0, double t1, const Vec&)>;

/// metric(x, y) = max over grid points i of ||x_i - y_i|| / ||x_i||, with the
/// absolute norm substituted where ||x_i|| < 1e-14. Denominator comes from
/// the FIRST argument.
using MetricFn = std::function<double(const Vec&, const Vec&)>;

/// Metric over consecutive groups of point_dim entries.
MetricFn pointwise_metric(std::size_t point_dim);

enum class Mode { regular, pipelined };

struct ParallelPlan {
    double t0 = 0.0;
    double horizon = 1.0;     // T; interval ends at t0 + T
    int intervals = 4;        // n
    int workers = 1;          // m
    double cost_ratio = 2.0;  // r, informational for live runs
    int max_iterations = 10;  // l_max
    double tolerance = 1e-10; // stop when eta_tilde < tolerance
    Mode mode = Mode::regular;

    double interval_length() const { return horizon / intervals; }
    /// T_n; always computed through this so every propagator call sees
    /// bitwise-identical boundary times.
    double boundary_time(int n) const { return t0 + interval_length() * n; }
};

struct ConvergenceReport {
    std::vector<double> eta_tilde;  // eta_tilde[k-1] for iteration k
    std::vector<double> eta;        // vs serial fine; filled only if a reference was given
    int iterations_used = 0;
    bool converged = false;
};

struct RunResult {
    std::vector<Vec> states;  // boundary states X[0..n] at the final iteration
    ConvergenceReport report;
    ScheduleTrace trace;
};

/// Serial building blocks (also the documented math of the scheme; the
/// threaded engine executes the same formulas task by task).
///
/// Initial prediction X0[n] = G(T_{n-1}, T_n, X0[n-1]).
std::vector<Vec> coarse_sweep_initial(const ParallelPlan& plan, const PropagatorFn& coarse, const Vec& x0);

/// Fine solves Xp[n] = F(T_{n-1}, T_n, X_prev[n-1]) for n = k..N.
/// Slots below k are left as copies of X_prev.
std::vector<Vec> fine_parallel(const ParallelPlan& plan, const PropagatorFn& fine,
                               const std::vector<Vec>& x_prev, int k);

/// Corrector X[n] = Xp[n] + G(.., X[n-1]) - g_cache[n] for n = k+1..N, with
/// the frozen prefix copied from x_prev and X[k] seeded from Xp[k].
/// g_cache is updated in place for the next iteration.
std::vector<Vec> correct(const ParallelPlan& plan, const PropagatorFn& coarse, const std::vector<Vec>& x_prime,
                         const std::vector<Vec>& x_prev, std::vector<Vec>& g_cache, int k);

/// Full driver over a pool of plan.workers threads. Interval n's fine task is
/// assigned to worker (n-1) mod m; coarse and corrector solves occupy worker
/// 0's lane. Regular mode separates each iteration's phases with barriers;
/// pipelined mode dispatches a fine task the moment its input boundary state
/// exists. Both modes produce identical iterates; only the trace differs.
///
/// The optional reference holds serial-fine boundary states (index 0..n) and
/// enables the true-error column of the report.
RunResult run(const ParallelPlan& plan, const PropagatorFn& coarse, const PropagatorFn& fine, const Vec& x0,
              const MetricFn& metric, const std::vector<Vec>* reference = nullptr);

}  // namespace pintswim::parareal
