#pragma once

#include <vector>

#include "pintswim/schedule_trace.hpp"

namespace pintswim::cost_model {

enum class Mode { regular, pipelined };

struct CostInputs {
    int intervals = 8;    // n
    int workers = 2;      // m
    int iterations = 3;   // l (corrector iterations)
    double total_fine = 1.0;  // T, serial fine time over the whole horizon
    double ratio = 2.0;       // r > 1, fine/coarse cost per interval

    double fine_cost() const { return total_fine / intervals; }          // T_F
    double coarse_cost() const { return fine_cost() / ratio; }           // T_G
};

/// Idle-time approximations. The event simulator below is the ground truth
/// these are tested against; they assume n >> m and ignore fine-phase load
/// imbalance.
double w_regular(const CostInputs& ci);    // (m-1) T_G (l n - l(l-1)/2)
double w_pipelined(const CostInputs& ci);  // m(m-1)/2 T_G
double delta_w(const CostInputs& ci);      // closed form of the difference

/// Model's predicted runtime gap between the modes (the analysis equates the
/// measured gap with the idle-time difference).
double predicted_gap(const CostInputs& ci);

/// Exact schedule: unit costs T_G for coarse/corrector solves and T_F for
/// fine solves, zero dispatch latency, the same dependency and lane rules as
/// the live driver (serial work prioritized on worker 0, fine tasks
/// round-robin by interval). Runs all l iterations.
ScheduleTrace simulate_schedule(const CostInputs& ci, Mode mode);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

/// Least-squares line through (1/r, gap) measurements; needs at least 3.
LineFit fit_gap_vs_inv_r(const std::vector<std::pair<double, double>>& ratio_gap);

}  // namespace pintswim::cost_model
