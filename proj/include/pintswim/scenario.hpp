#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pintswim/rod.hpp"
#include "pintswim/stokes.hpp"

namespace pintswim {

enum class Placement { grid, random };

/// Raw scenario parameters. epsilon = 0 and sigma = 0 mean "derive the
/// default" (4 ds and 3 epsilon respectively); resolve() fills them in.
struct ScenarioConfig {
    std::size_t rod_count = 1;
    std::size_t nodes_per_rod = 51;  // M
    double rod_length = 1.0;         // L
    // Desk defaults: one waveform beat per unit time, preferred curvature
    // k^2 A ~ 2, stretch/shear two decades stiffer than the driven bend,
    // explicit-Euler stable at dt ~ 1/32 for M = 21.
    MaterialParams material{0.01, 0.01, 0.01, 2.0, 2.0, 2.0};
    WaveformParams waveform{0.05, 2.0 * M_PI, 1.0};
    double epsilon = 0.0;
    double mu = 1.0;
    WallMode wall_mode = WallMode::free_space;
    double lj_well_depth = 0.0;  // 0 disables repulsion
    double lj_sigma = 0.0;
    double wall_clearance = 1.0;  // d_z
    std::uint64_t seed = 1;
    double fine_dt = 1e-6;
    double horizon = 1e-3;  // T
    Placement placement = Placement::grid;
};

/// Fully-resolved runtime bundle consumed by the propagators.
struct Scenario {
    ScenarioConfig cfg;
    RodDiscretization disc;
    KernelParams kernel;
    LJParams lj;
    std::size_t lj_self_exclusion = 4;  // straight-rod-silent window, in nodes
};

/// Validates and derives: ds, epsilon = 4 ds, sigma = 3 epsilon, LJ backbone
/// exclusion window just past the cutoff.
Scenario make_scenario(const ScenarioConfig& cfg);

/// Straight rods with D3 along the axis; grid placement stacks rods parallel
/// to the wall plane at height d_z, random placement draws centre and
/// orientation from the seed and rejects layouts that put any node below
/// d_z/2 or any inter-rod node pair closer than 2 sigma.
/// Throws after 10^4 failed attempts for a rod.
std::vector<RodState> build_initial_state(const Scenario& sc);

}  // namespace pintswim
