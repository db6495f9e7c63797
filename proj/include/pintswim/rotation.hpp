#pragma once

#include "pintswim/geom.hpp"

namespace pintswim {

/// Proper rotation: R^T R = I, det R = +1 (checked by is_rotation, not enforced
/// on construction; hot paths build rotations only through the factory functions
/// below, which guarantee it).
using Rot3 = Mat3;

struct AxisAngle {
    Vec3 axis;     // unit vector
    double angle;  // radians, canonical range [0, pi]
};

/// Orthogonality + determinant residual, Frobenius. Zero for an exact rotation.
double rotation_residual(const Rot3& r);
bool is_rotation(const Rot3& r, double tol = 1e-12);

/// Rodrigues formula R = I cos(t) + (1-cos(t)) n n^T + sin(t) K(n).
/// Axis within 1e-6 of unit length is renormalized (with a note on stderr);
/// anything further off is rejected.
Rot3 from_axis_angle(const AxisAngle& aa);

/// Inverse map with angle in [0, pi]. Identity returns axis +z by convention.
/// Near pi the axis is recovered from the diagonal entries with signs fixed
/// from the off-diagonal products.
AxisAngle to_axis_angle(const Rot3& r);

/// Closed-form square root: returns S with S*S = R, rotating about the same
/// axis by half the angle. Three branches (near-identity series, half-angle
/// interior, near-pi diagonal recovery) keep it stable over the whole range.
Rot3 sqrt_rotation(const Rot3& r);

namespace rotation_detail {
// Branch thresholds on theta; interior formula handles [lo, pi - hi].
// The interior axis comes from the skew part, whose entries cancel
// catastrophically near pi (error ~ eps_mach/(pi - theta)); the diagonal
// recovery is flat there, so it takes over while both routes still agree
// to a few ulps.
inline constexpr double kThetaLo = 1e-7;
inline constexpr double kThetaHi = 1e-2;
}  // namespace rotation_detail

}  // namespace pintswim
