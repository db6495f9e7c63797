#include "pintswim/harness.hpp"

namespace pintswim::harness {

PhysicsRun prepare(const RunConfig& cfg) {
    PhysicsRun run;
    run.scenario = make_scenario(cfg.scenario);
    run.plan.t0 = 0.0;
    run.plan.horizon = cfg.scenario.horizon;
    run.plan.intervals = cfg.intervals;
    run.plan.workers = cfg.workers;
    run.plan.cost_ratio = cfg.ratio;
    run.plan.max_iterations = cfg.max_iterations;
    run.plan.tolerance = cfg.tolerance;
    run.plan.mode = cfg.mode;

    run.x0 = pack_state(build_initial_state(run.scenario));

    const std::size_t rods = cfg.scenario.rod_count;
    const std::size_t nodes = cfg.scenario.nodes_per_rod;
    const Scenario sc = run.scenario;

    const StepperConfig fine_cfg{0.0, Scheme::rk2, static_cast<std::size_t>(cfg.fine_steps_per_interval)};
    const StepperConfig coarse_cfg{0.0, Scheme::euler, static_cast<std::size_t>(cfg.resolved_coarse_steps())};

    run.fine = [sc, rods, nodes, fine_cfg](double t0, double t1, const parareal::Vec& x) {
        return pack_state(propagate(unpack_state(x, rods, nodes), t0, t1, fine_cfg, sc));
    };
    run.coarse = [sc, rods, nodes, coarse_cfg](double t0, double t1, const parareal::Vec& x) {
        return pack_state(propagate(unpack_state(x, rods, nodes), t0, t1, coarse_cfg, sc));
    };
    return run;
}

std::vector<parareal::Vec> serial_fine_boundaries(const PhysicsRun& run) {
    return parareal::coarse_sweep_initial(run.plan, run.fine, run.x0);
}

}  // namespace pintswim::harness
