#pragma once

#include <stdexcept>
#include <vector>

#include "pintswim/scenario.hpp"

namespace pintswim {

/// Dynamic state of the whole multi-rod system.
using SystemState = std::vector<RodState>;

enum class Scheme { euler, rk2 };

struct StepperConfig {
    double dt = 1e-6;
    Scheme scheme = Scheme::rk2;
    /// When > 0, overrides dt with (t1 - t0) / steps_per_interval.
    std::size_t steps_per_interval = 0;
};

/// Raised when a single step moves a node farther than 10 segment lengths,
/// which in practice means the explicit scheme left its stability region.
struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SystemVelocities {
    std::vector<Vec3> u;      // one entry per node, rods concatenated
    std::vector<Vec3> omega;
};

/// Elastic + repulsive loads pushed through the Stokes mobility. extra, when
/// given, is added to the assembled per-node loads before evaluation
/// (superposition hook used by the linearity tests).
SystemVelocities rhs(const SystemState& state, double t, const Scenario& sc, const LoadSet* extra = nullptr);

/// Forward-map a velocity sample over dt: positions move by u dt, triads
/// rotate about omega/|omega| by |omega| dt (exact Rodrigues map, so frames
/// stay orthonormal); zero omega leaves a triad untouched. Shared by the
/// Euler step and both RK2 stages. Throws StiffnessError past the
/// displacement guard.
SystemState advance_state(const SystemState& state, const SystemVelocities& vel, double dt,
                          const Scenario& sc);

SystemState step_euler(const SystemState& state, double t, double dt, const Scenario& sc);
SystemState step_rk2(const SystemState& state, double t, double dt, const Scenario& sc);

/// Serial composition of steps over [t0, t1]. With steps_per_interval unset,
/// (t1 - t0)/dt must be integral to 1e-9; no partial steps are taken.
SystemState propagate(const SystemState& state, double t0, double t1, const StepperConfig& cfg,
                      const Scenario& sc);

/// Wall-time breakdown of the solver stages, accumulated across all steps
/// (thread-safe). The harness resets it per run and reports the totals.
struct TimingBreakdown {
    double initialization = 0.0;    // load assembly
    double velocity = 0.0;          // mobility sums
    double triad_update = 0.0;      // integration / frame rotation
};

namespace timing {
void reset();
TimingBreakdown snapshot();
}  // namespace timing

}  // namespace pintswim
