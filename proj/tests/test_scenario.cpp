#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pintswim/scenario.hpp"

using namespace pintswim;

TEST_CASE("make_scenario derives the documented defaults") {
    ScenarioConfig cfg;
    cfg.nodes_per_rod = 51;
    cfg.rod_length = 1.0;
    const auto sc = make_scenario(cfg);
    const double ds = 1.0 / 50.0;
    CHECK(sc.disc.ds() == doctest::Approx(ds));
    CHECK(sc.kernel.epsilon == doctest::Approx(4.0 * ds));
    CHECK(sc.lj.sigma == doctest::Approx(12.0 * ds));
    CHECK(sc.lj.cutoff() == doctest::Approx(std::pow(2.0, 1.0 / 6.0) * sc.lj.sigma));
    // Backbone exclusion window clears the cutoff, so a straight rod is silent.
    CHECK(static_cast<double>(sc.lj_self_exclusion) * ds > sc.lj.cutoff());

    ScenarioConfig custom = cfg;
    custom.epsilon = 0.5;
    CHECK(make_scenario(custom).kernel.epsilon == 0.5);
    CHECK(make_scenario(custom).lj.sigma == doctest::Approx(1.5));

    ScenarioConfig bad = cfg;
    bad.nodes_per_rod = 2;
    CHECK_THROWS_AS(make_scenario(bad), std::invalid_argument);
}

TEST_CASE("grid placement: straight rod parallel to the wall plane") {
    ScenarioConfig cfg;
    cfg.rod_count = 1;
    cfg.nodes_per_rod = 51;
    cfg.wall_clearance = 1.0;
    const auto sc = make_scenario(cfg);
    const auto rods = build_initial_state(sc);
    REQUIRE(rods.size() == 1);
    const auto& rod = rods[0];
    const double ds = sc.disc.ds();
    for (std::size_t k = 0; k < rod.node_count(); ++k) {
        CHECK(rod.x[k].z == 1.0);
        if (k + 1 < rod.node_count()) {
            CHECK(norm(rod.x[k + 1] - rod.x[k]) == doctest::Approx(ds).epsilon(1e-14));
        }
        // Right-handed frame with D3 along the axis.
        CHECK(norm(rod.d3[k] - Vec3{1, 0, 0}) == 0.0);
        Mat3 d;
        for (std::size_t c = 0; c < 3; ++c) {
            d(c, 0) = rod.d1[k][c];
            d(c, 1) = rod.d2[k][c];
            d(c, 2) = rod.d3[k][c];
        }
        CHECK(det(d) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(rod.triad_residual() < 1e-15);
}

TEST_CASE("random placement is seeded and respects separations") {
    ScenarioConfig cfg;
    cfg.rod_count = 8;
    cfg.nodes_per_rod = 21;
    cfg.placement = Placement::random;
    cfg.seed = 12345;
    const auto sc = make_scenario(cfg);

    const auto a = build_initial_state(sc);
    const auto b = build_initial_state(sc);
    REQUIRE(a.size() == 8);
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t k = 0; k < a[r].node_count(); ++k) {
            CHECK(a[r].x[k].x == b[r].x[k].x);
            CHECK(a[r].x[k].y == b[r].x[k].y);
            CHECK(a[r].x[k].z == b[r].x[k].z);
            CHECK(a[r].x[k].z >= 0.5 * cfg.wall_clearance);
        }
    }

    // Inter-rod node separation at least 2 sigma.
    const double min_sep = 2.0 * sc.lj.sigma;
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t s = r + 1; s < a.size(); ++s) {
            for (const auto& xa : a[r].x) {
                for (const auto& xb : a[s].x) {
                    CHECK(norm(xa - xb) >= min_sep);
                }
            }
        }
    }

    ScenarioConfig other = cfg;
    other.seed = 54321;
    const auto c = build_initial_state(make_scenario(other));
    CHECK(norm(c[0].x[0] - a[0].x[0]) > 0.0);
}

TEST_CASE("impossible packing reports a placement error") {
    ScenarioConfig cfg;
    cfg.rod_count = 40;
    cfg.nodes_per_rod = 11;
    cfg.placement = Placement::random;
    cfg.lj_sigma = 2.0;  // separation demand far beyond the box
    CHECK_THROWS_AS(build_initial_state(make_scenario(cfg)), std::runtime_error);
}
