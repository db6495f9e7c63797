#include "pintswim/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pintswim {

double rotation_residual(const Rot3& r) {
    const Mat3 g = transpose(r) * r - Mat3::identity();
    const double ortho = frobenius_norm(g);
    const double d = det(r) - 1.0;
    return std::sqrt(ortho * ortho + d * d);
}

bool is_rotation(const Rot3& r, double tol) { return rotation_residual(r) <= tol; }

Rot3 from_axis_angle(const AxisAngle& aa) {
    Vec3 n = aa.axis;
    const double len = norm(n);
    if (std::abs(len - 1.0) > 1e-6) {
        throw std::invalid_argument("from_axis_angle: axis is not a unit vector");
    }
    if (len != 1.0) {
        if (std::abs(len - 1.0) > 1e-12) {
            std::fprintf(stderr, "from_axis_angle: normalizing axis (|n|-1 = %.3e)\n", len - 1.0);
        }
        n = n / len;
    }
    const double c = std::cos(aa.angle);
    const double s = std::sin(aa.angle);
    return c * Mat3::identity() + (1.0 - c) * outer(n, n) + s * skew(n);
}

namespace {

// sin(theta) * n, from the skew-symmetric part of R.
Vec3 skew_vector(const Rot3& r) {
    return {0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)), 0.5 * (r(1, 0) - r(0, 1))};
}

// Axis near theta = pi: n_i^2 = (R_ii - cos) / (1 - cos), signs fixed so that
// the largest component is positive and the others follow the off-diagonal
// products of the symmetric part, (1-cos) n_i n_j. The overall sign is then
// aligned with the skew vector sin(theta) n, which still carries it for any
// theta strictly below pi; at exactly pi either sign is valid.
Vec3 axis_from_diagonal(const Rot3& r, double cos_theta) {
    const double omc = 1.0 - cos_theta;  // ~2 near pi, well conditioned
    Vec3 n;
    for (int i = 0; i < 3; ++i) {
        n[i] = std::sqrt(std::max(0.0, (r(i, i) - cos_theta) / omc));
    }
    int k = 0;
    if (n.y > n[k]) k = 1;
    if (n.z > n[k]) k = 2;
    const double sym01 = 0.5 * (r(0, 1) + r(1, 0));
    const double sym02 = 0.5 * (r(0, 2) + r(2, 0));
    const double sym12 = 0.5 * (r(1, 2) + r(2, 1));
    auto sym = [&](int i, int j) { return (i + j == 1) ? sym01 : (i + j == 2 ? sym02 : sym12); };
    for (int j = 0; j < 3; ++j) {
        if (j == k) continue;
        if (sym(k, j) < 0.0) n[j] = -n[j];
    }
    const double len = norm(n);
    if (len == 0.0) return {0, 0, 1};
    n = n / len;
    if (dot(n, skew_vector(r)) < 0.0) n = -n;
    return n;
}

}  // namespace

AxisAngle to_axis_angle(const Rot3& r) {
    const double cos_theta = std::clamp(0.5 * (trace(r) - 1.0), -1.0, 1.0);
    const Vec3 s = skew_vector(r);
    const double sin_theta = std::min(norm(s), 1.0);
    const double theta = std::atan2(sin_theta, cos_theta);

    if (theta < rotation_detail::kThetaLo) {
        // Axis ill-defined at the identity; fixed +z keeps output deterministic.
        const Vec3 axis = sin_theta > 0.0 ? s / norm(s) : Vec3{0, 0, 1};
        return {axis, theta};
    }
    if (theta > M_PI - rotation_detail::kThetaHi) {
        return {axis_from_diagonal(r, cos_theta), theta};
    }
    return {s / norm(s), theta};
}

Rot3 sqrt_rotation(const Rot3& r) {
    const double cos_theta = std::clamp(0.5 * (trace(r) - 1.0), -1.0, 1.0);
    const Vec3 s = skew_vector(r);
    const double theta = std::atan2(std::min(norm(s), 1.0), cos_theta);

    if (theta < rotation_detail::kThetaLo) {
        // Near the identity: S = I + W/2 + W^2/8 with W the skew part of R,
        // accurate to O(theta^3) and free of the ill-conditioned axis.
        const Mat3 w = skew(s);
        return Mat3::identity() + 0.5 * w + 0.125 * (w * w);
    }
    if (theta > M_PI - rotation_detail::kThetaHi) {
        const Vec3 n = axis_from_diagonal(r, cos_theta);
        return from_axis_angle({n, 0.5 * theta});
    }
    return from_axis_angle({s / norm(s), 0.5 * theta});
}

}  // namespace pintswim
