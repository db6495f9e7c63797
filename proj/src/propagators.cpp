#include "pintswim/propagators.hpp"

#include <atomic>
#include <chrono>
#include <cmath>

#include "pintswim/rotation.hpp"

namespace pintswim {

namespace timing {
namespace {
std::atomic<long long> g_init_ns{0};
std::atomic<long long> g_velocity_ns{0};
std::atomic<long long> g_triad_ns{0};

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    long long ns() const {
        return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start)
            .count();
    }
};
}  // namespace

void reset() {
    g_init_ns = 0;
    g_velocity_ns = 0;
    g_triad_ns = 0;
}

TimingBreakdown snapshot() {
    return {static_cast<double>(g_init_ns.load()) * 1e-9, static_cast<double>(g_velocity_ns.load()) * 1e-9,
            static_cast<double>(g_triad_ns.load()) * 1e-9};
}
}  // namespace timing

SystemVelocities rhs(const SystemState& state, double t, const Scenario& sc, const LoadSet* extra) {
    const std::size_t rod_count = state.size();
    std::size_t total = 0;
    for (const auto& r : state) total += r.node_count();

    timing::Stopwatch sw_init;
    LoadSet loads;
    loads.f.resize(total);
    loads.n.resize(total);
    std::vector<Vec3> positions(total);

    std::vector<std::size_t> offset(rod_count);
    {
        std::size_t acc = 0;
        for (std::size_t r = 0; r < rod_count; ++r) {
            offset[r] = acc;
            acc += state[r].node_count();
        }
    }

    const auto n_rods = static_cast<std::ptrdiff_t>(rod_count);
#pragma omp parallel for schedule(static) if (n_rods > 1)
    for (std::ptrdiff_t r = 0; r < n_rods; ++r) {
        const auto internal = internal_loads(state[r], sc.disc, sc.cfg.material, sc.cfg.waveform, t);
        const auto nodal = nodal_loads(state[r], sc.disc, internal);
        for (std::size_t k = 0; k < state[r].node_count(); ++k) {
            positions[offset[r] + k] = state[r].x[k];
            loads.f[offset[r] + k] = nodal.f[k];
            loads.n[offset[r] + k] = nodal.n[k];
        }
    }

    if (rod_count >= 2 && sc.lj.well_depth > 0.0) {
        const auto lj = lj_repulsion(state, sc.lj, sc.lj_self_exclusion);
        const double inv_ds = 1.0 / sc.disc.ds();
        for (std::size_t i = 0; i < total; ++i) loads.f[i] += lj[i] * inv_ds;
    }
    if (extra != nullptr) {
        if (extra->f.size() != total || extra->n.size() != total) {
            throw std::invalid_argument("rhs: injected LoadSet has wrong node count");
        }
        for (std::size_t i = 0; i < total; ++i) {
            loads.f[i] += extra->f[i];
            loads.n[i] += extra->n[i];
        }
    }
    timing::g_init_ns += sw_init.ns();

    timing::Stopwatch sw_vel;
    auto field = evaluate_velocities(positions, positions, loads, sc.kernel);
    timing::g_velocity_ns += sw_vel.ns();

    return {std::move(field.u), std::move(field.omega)};
}

SystemState advance_state(const SystemState& state, const SystemVelocities& vel, double dt,
                          const Scenario& sc) {
    timing::Stopwatch sw;
    std::size_t total = 0;
    for (const auto& rod : state) total += rod.node_count();
    if (vel.u.size() != total || vel.omega.size() != total) {
        throw std::invalid_argument("advance_state: velocity sample has wrong node count");
    }
    const double max_disp = 10.0 * sc.disc.ds();
    SystemState out = state;
    std::size_t idx = 0;
    for (auto& rod : out) {
        for (std::size_t k = 0; k < rod.node_count(); ++k, ++idx) {
            const Vec3 du = vel.u[idx] * dt;
            if (norm(du) > max_disp) {
                throw StiffnessError("time step moved a node more than 10 segment lengths; reduce dt or r");
            }
            rod.x[k] += du;
            const Vec3 w = vel.omega[idx];
            const double speed = norm(w);
            if (speed > 0.0) {
                const Rot3 q = from_axis_angle({w / speed, speed * dt});
                rod.d1[k] = q * rod.d1[k];
                rod.d2[k] = q * rod.d2[k];
                rod.d3[k] = q * rod.d3[k];
            }
        }
        reorthonormalize(rod);
    }
    timing::g_triad_ns += sw.ns();
    return out;
}

SystemState step_euler(const SystemState& state, double t, double dt, const Scenario& sc) {
    return advance_state(state, rhs(state, t, sc), dt, sc);
}

SystemState step_rk2(const SystemState& state, double t, double dt, const Scenario& sc) {
    const auto mid = advance_state(state, rhs(state, t, sc), 0.5 * dt, sc);
    return advance_state(state, rhs(mid, t + 0.5 * dt, sc), dt, sc);
}

SystemState propagate(const SystemState& state, double t0, double t1, const StepperConfig& cfg,
                      const Scenario& sc) {
    if (t1 < t0) throw std::invalid_argument("propagate: t1 < t0");
    if (t1 == t0) return state;

    std::size_t steps;
    double dt;
    if (cfg.steps_per_interval > 0) {
        steps = cfg.steps_per_interval;
        dt = (t1 - t0) / static_cast<double>(steps);
    } else {
        if (cfg.dt <= 0.0) throw std::invalid_argument("propagate: dt must be positive");
        const double ratio = (t1 - t0) / cfg.dt;
        steps = static_cast<std::size_t>(std::llround(ratio));
        if (steps == 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * static_cast<double>(steps)) {
            throw std::invalid_argument("propagate: interval is not an integral number of steps");
        }
        dt = cfg.dt;
    }

    SystemState cur = state;
    double t = t0;
    for (std::size_t i = 0; i < steps; ++i) {
        cur = (cfg.scheme == Scheme::euler) ? step_euler(cur, t, dt, sc) : step_rk2(cur, t, dt, sc);
        t += dt;
    }
    return cur;
}

}  // namespace pintswim
