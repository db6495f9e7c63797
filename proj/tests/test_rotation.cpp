#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "pintswim/rotation.hpp"

using namespace pintswim;

namespace {

// Rodrigues evaluated directly for any angle (test-local, no canonical range).
Rot3 raw_rodrigues(const Vec3& n, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return c * Mat3::identity() + (1.0 - c) * outer(n, n) + s * skew(n);
}

}  // namespace

TEST_CASE("from_axis_angle textbook rotations") {
    const Rot3 id = from_axis_angle({{0, 0, 1}, 0.0});
    CHECK(frobenius_norm(id - Mat3::identity()) < 1e-15);

    const Rot3 z90 = from_axis_angle({{0, 0, 1}, M_PI / 2});
    Mat3 want;
    want.m = {0, -1, 0, 1, 0, 0, 0, 0, 1};
    CHECK(frobenius_norm(z90 - want) < 1e-15);

    const Rot3 xpi = from_axis_angle({{1, 0, 0}, M_PI});
    Mat3 diag;
    diag.m = {1, 0, 0, 0, -1, 0, 0, 0, -1};
    CHECK(frobenius_norm(xpi - diag) < 1e-15);

    // Axis is fixed by the rotation.
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i) {
        const Vec3 n = oracles::random_unit(rng);
        const Rot3 r = from_axis_angle({n, oracles::uniform(rng, 0.0, M_PI)});
        CHECK(norm(r * n - n) < 1e-14);
        CHECK(rotation_residual(r) < 1e-12);
    }
}

TEST_CASE("from_axis_angle axis validation") {
    CHECK_THROWS_AS(from_axis_angle({{0, 0, 1.1}, 0.3}), std::invalid_argument);
    // Slightly off unit is normalized.
    const Rot3 r = from_axis_angle({{0, 0, 1.0 + 1e-9}, 0.3});
    CHECK(rotation_residual(r) < 1e-12);
}

TEST_CASE("to_axis_angle branches and conventions") {
    const AxisAngle id = to_axis_angle(Mat3::identity());
    CHECK(id.angle == 0.0);
    CHECK(norm(id.axis - Vec3{0, 0, 1}) == 0.0);  // deterministic convention

    Mat3 diag;
    diag.m = {1, 0, 0, 0, -1, 0, 0, 0, -1};
    const AxisAngle pi_x = to_axis_angle(diag);
    CHECK(pi_x.angle == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK(norm(pi_x.axis - Vec3{1, 0, 0}) < 1e-12);
}

TEST_CASE("axis-angle round trip on random rotations") {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Vec3 n = oracles::random_unit(rng);
        const double theta = oracles::uniform(rng, 1e-6, M_PI - 1e-6);
        const Rot3 r = from_axis_angle({n, theta});
        const AxisAngle aa = to_axis_angle(r);
        CHECK(aa.angle >= 0.0);
        CHECK(aa.angle <= M_PI);
        worst = std::max(worst, frobenius_norm(from_axis_angle(aa) - r));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("sqrt_rotation analytic cases") {
    CHECK(frobenius_norm(sqrt_rotation(Mat3::identity()) - Mat3::identity()) < 1e-13);

    const Rot3 z90 = from_axis_angle({{0, 0, 1}, M_PI / 2});
    const Rot3 z45 = from_axis_angle({{0, 0, 1}, M_PI / 4});
    CHECK(frobenius_norm(sqrt_rotation(z90) - z45) < 1e-14);
}

TEST_CASE("sqrt_rotation residual statistics over the sampling scheme") {
    // One random unit axis, 100 angles uniform in [-0.1, pi + 0.1],
    // canonicalized into [0, pi] by flipping the axis.
    std::mt19937_64 rng(2024);
    const Vec3 axis = oracles::random_unit(rng);
    double sum = 0.0, worst = 0.0;
    const int samples = 100;
    for (int i = 0; i < samples; ++i) {
        double theta = oracles::uniform(rng, -0.1, M_PI + 0.1);
        Vec3 n = axis;
        if (theta < 0.0) {
            n = -n;
            theta = -theta;
        } else if (theta > M_PI) {
            n = -n;
            theta = 2.0 * M_PI - theta;
        }
        const Rot3 r = raw_rodrigues(n, theta);
        const Rot3 s = sqrt_rotation(r);
        const double res = frobenius_norm(s * s - r);
        sum += res;
        worst = std::max(worst, res);
        CHECK(rotation_residual(s) < 1e-12);
    }
    CHECK(sum / samples <= 1e-13);
    CHECK(worst <= 1e-7);
}

TEST_CASE("sqrt_rotation interior sweep keeps tight residuals") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const Vec3 n = oracles::random_unit(rng);
        const double theta = oracles::uniform(rng, 0.0, M_PI - 1e-6);
        const Rot3 r = from_axis_angle({n, theta});
        const Rot3 s = sqrt_rotation(r);
        CHECK(frobenius_norm(s * s - r) < 1e-13);
        // Same axis, half angle.
        if (theta > 1e-3) {
            const AxisAngle haa = to_axis_angle(s);
            CHECK(std::abs(haa.angle - 0.5 * theta) < 1e-10);
            CHECK(norm(haa.axis - to_axis_angle(r).axis) < 1e-8);
        }
    }
}

TEST_CASE("sqrt_rotation branch continuity") {
    // Residual must not jump more than 10x across either branch threshold.
    const Vec3 n = normalized(Vec3{0.3, -0.5, 0.81});
    auto residual_at = [&](double theta) {
        const Rot3 r = raw_rodrigues(n, theta);
        const Rot3 s = sqrt_rotation(r);
        return frobenius_norm(s * s - r);
    };
    for (const double pivot : {rotation_detail::kThetaLo, M_PI - rotation_detail::kThetaHi}) {
        double lo = 0.0, hi = 0.0;
        for (int i = 1; i <= 8; ++i) {
            lo = std::max(lo, residual_at(pivot * (1.0 - 1e-3 * i)) + 1e-16);
            hi = std::max(hi, residual_at(pivot * (1.0 + 1e-3 * i)) + 1e-16);
        }
        const double jump = std::max(lo / hi, hi / lo);
        CHECK(jump < 10.0);
    }
}

TEST_CASE("sqrt_rotation near-pi branch") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        const Vec3 n = oracles::random_unit(rng);
        const double theta = M_PI - oracles::uniform(rng, 0.0, 1e-6);
        const Rot3 r = raw_rodrigues(n, theta);
        const Rot3 s = sqrt_rotation(r);
        CHECK(frobenius_norm(s * s - r) < 1e-7);
        CHECK(rotation_residual(s) < 1e-12);
    }
    // Exactly pi about each coordinate axis.
    for (const Vec3 axis : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}) {
        const Rot3 r = raw_rodrigues(axis, M_PI);
        const Rot3 s = sqrt_rotation(r);
        CHECK(frobenius_norm(s * s - r) < 1e-7);
    }
}
