#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pintswim/geom.hpp"

namespace pintswim {

enum class WallMode { free_space, image_wall };

struct KernelParams {
    double epsilon = 0.1;  // regularization radius (rod thickness scale)
    double mu = 1.0;       // dynamic viscosity
    WallMode wall_mode = WallMode::free_space;
};

/// The five radial kernels of the regularized Stokeslet/rotlet pair for the
/// blob 15 eps^4 / (8 pi (r^2+eps^2)^(7/2)), all smooth at r = 0:
///   mu u = f H1 + (f.r) r H2 + (n x r) H3
///   mu w = (f x r) H3 + n H4 + (n.r) r H5
struct HValues {
    double h1, h2, h3, h4, h5;
};

HValues h_functions(double r, double epsilon);

/// Per-node force/torque densities exerted on the fluid.
struct LoadSet {
    std::vector<Vec3> f;  // force density
    std::vector<Vec3> n;  // torque density
};

struct VelocityField {
    std::vector<Vec3> u;      // linear velocities
    std::vector<Vec3> omega;  // angular velocities
};

/// Superposition sum over all sources for every target; O(targets x sources).
/// Parallel over targets; within a target, sources accumulate in index order,
/// so the result is bitwise reproducible for any thread count.
VelocityField evaluate_velocities(std::span<const Vec3> targets, std::span<const Vec3> sources,
                                  const LoadSet& loads, const KernelParams& kp);

/// Plain-loop twin of evaluate_velocities; reference for tests and the
/// kernel benchmark. Bitwise-identical output.
VelocityField evaluate_velocities_serial(std::span<const Vec3> targets, std::span<const Vec3> sources,
                                         const LoadSet& loads, const KernelParams& kp);

/// Dense 6N x 6N mobility matrix (diagnostic path, O(N^2) memory). Row-major,
/// unknown ordering [u_1, w_1, u_2, w_2, ...] vs [f_1, n_1, ...]. Refuses
/// N > node_cap.
std::vector<double> assemble_grand_mobility(std::span<const Vec3> nodes, const KernelParams& kp,
                                            std::size_t node_cap = 512);

}  // namespace pintswim
