#pragma once

#include <cstddef>
#include <vector>

#include "pintswim/geom.hpp"
#include "pintswim/stokes.hpp"

namespace pintswim {

struct RodDiscretization {
    std::size_t node_count = 3;  // M
    double length = 1.0;         // L
    double ds() const { return length / static_cast<double>(node_count - 1); }
};

/// Centerline nodes plus per-node orthonormal director triads {D1, D2, D3};
/// D3 is tangent-like, D1/D2 span the cross-section, det[D1 D2 D3] = +1.
struct RodState {
    std::vector<Vec3> x;
    std::vector<Vec3> d1, d2, d3;

    std::size_t node_count() const { return x.size(); }
    /// Max orthonormality residual over nodes (Frobenius of D^T D - I).
    double triad_residual() const;
};

struct MaterialParams {
    double a1 = 1.0, a2 = 1.0, a3 = 1.0;  // bending, bending, torsion
    double b1 = 1.0, b2 = 1.0, b3 = 1.0;  // shear, shear, stretch
};

/// Traveling-wave actuation: preferred strain-twist (0, -k^2 A sin(k s + f t), 0).
struct WaveformParams {
    double amplitude = 0.0;   // A
    double frequency = 0.0;   // f (angular)
    double wavelength = 1.0;  // lambda
    double wavenumber() const;
};

Vec3 preferred_strain(double s, double t, const WaveformParams& w);

/// Contact forces and moments on the M-1 segments (index k is segment k+1/2).
struct InternalLoads {
    std::vector<Vec3> force;
    std::vector<Vec3> moment;
};

struct LJParams {
    double well_depth = 0.0;
    double sigma = 1.0;
    double cutoff() const;  // 2^(1/6) sigma, the potential minimum
};

/// Segment loads from the discrete strains; the mid-segment frame comes from
/// the half-angle rotation between adjacent triads. Throws on a degenerate
/// (zero-length) segment.
InternalLoads internal_loads(const RodState& state, const RodDiscretization& disc,
                             const MaterialParams& mat, const WaveformParams& wave, double t);

/// Force/torque densities the rod exerts on the fluid, free ends (ghost
/// segment loads vanish). Sums to zero net force and zero net torque about
/// the origin.
LoadSet nodal_loads(const RodState& state, const RodDiscretization& disc, const InternalLoads& loads);

/// Short-range repulsion between rods, plus same-rod pairs at least
/// self_exclusion nodes apart along the backbone. No-op for fewer than two
/// rods. Returns one force per node, concatenated in rod order; pair forces
/// are equal and opposite. Active only below the cutoff.
///
/// Callers should size self_exclusion so a straight rod is silent, i.e.
/// larger than cutoff()/ds; the minimum of 4 only shields the immediate
/// elastic stencil.
std::vector<Vec3> lj_repulsion(const std::vector<RodState>& rods, const LJParams& lj,
                               std::size_t self_exclusion = 4);

/// One modified Gram-Schmidt pass on every triad whose residual exceeds tol.
/// Returns the number of nodes touched.
std::size_t reorthonormalize(RodState& state, double tol = 1e-9);

}  // namespace pintswim
