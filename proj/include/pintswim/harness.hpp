#pragma once

#include "pintswim/config.hpp"
#include "pintswim/io.hpp"
#include "pintswim/parareal.hpp"
#include "pintswim/propagators.hpp"

namespace pintswim::harness {

/// A run configuration turned into everything the parareal driver needs:
/// resolved scenario, plan, packed initial state, and the coarse (Euler) and
/// fine (RK2) propagators over packed states. The wall-cost ratio r is
/// realized through step counts (RK2 costs two rhs evaluations per step).
struct PhysicsRun {
    Scenario scenario;
    parareal::ParallelPlan plan;
    parareal::Vec x0;
    parareal::PropagatorFn coarse;
    parareal::PropagatorFn fine;
};

PhysicsRun prepare(const RunConfig& cfg);

/// Serial fine solution at the interval boundaries, computed as the chained
/// per-interval fine solves (bitwise comparable with parareal iterates).
std::vector<parareal::Vec> serial_fine_boundaries(const PhysicsRun& run);

}  // namespace pintswim::harness
