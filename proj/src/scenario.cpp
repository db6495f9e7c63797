#include "pintswim/scenario.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace pintswim {

Scenario make_scenario(const ScenarioConfig& cfg) {
    if (cfg.nodes_per_rod < 3) throw std::invalid_argument("scenario: need at least 3 nodes per rod");
    if (cfg.rod_count < 1) throw std::invalid_argument("scenario: need at least one rod");
    if (cfg.rod_length <= 0.0 || cfg.mu <= 0.0) throw std::invalid_argument("scenario: L and mu must be positive");

    Scenario sc;
    sc.cfg = cfg;
    sc.disc = {cfg.nodes_per_rod, cfg.rod_length};
    const double ds = sc.disc.ds();

    sc.kernel.epsilon = cfg.epsilon > 0.0 ? cfg.epsilon : 4.0 * ds;
    sc.kernel.mu = cfg.mu;
    sc.kernel.wall_mode = cfg.wall_mode;

    sc.lj.well_depth = cfg.lj_well_depth;
    sc.lj.sigma = cfg.lj_sigma > 0.0 ? cfg.lj_sigma : 3.0 * sc.kernel.epsilon;
    sc.lj_self_exclusion = static_cast<std::size_t>(std::ceil(sc.lj.cutoff() / ds)) + 1;
    if (sc.lj_self_exclusion < 4) sc.lj_self_exclusion = 4;
    return sc;
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vec3 random_unit(std::mt19937_64& rng) {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double phi = 2.0 * M_PI * uniform01(rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
}

RodState straight_rod(const RodDiscretization& disc, const Vec3& start, const Vec3& axis, const Vec3& normal) {
    RodState rod;
    const std::size_t m = disc.node_count;
    const double ds = disc.ds();
    rod.x.resize(m);
    rod.d1.assign(m, normal);
    rod.d2.assign(m, cross(axis, normal));
    rod.d3.assign(m, axis);
    for (std::size_t k = 0; k < m; ++k) rod.x[k] = start + (static_cast<double>(k) * ds) * axis;
    return rod;
}

// Deterministic unit vector orthogonal to (unit) a.
Vec3 any_normal(const Vec3& a) {
    const Vec3 pick = std::abs(a.x) <= std::abs(a.y) && std::abs(a.x) <= std::abs(a.z) ? Vec3{1, 0, 0}
                      : std::abs(a.y) <= std::abs(a.z)                                 ? Vec3{0, 1, 0}
                                                                                       : Vec3{0, 0, 1};
    return normalized(pick - dot(pick, a) * a);
}

double min_pair_distance(const RodState& a, const RodState& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& xa : a.x)
        for (const auto& xb : b.x) best = std::min(best, norm(xa - xb));
    return best;
}

}  // namespace

std::vector<RodState> build_initial_state(const Scenario& sc) {
    const auto& cfg = sc.cfg;
    std::vector<RodState> rods;
    rods.reserve(cfg.rod_count);

    if (cfg.placement == Placement::grid) {
        const double gap = std::max(4.0 * sc.lj.sigma, 0.2 * cfg.rod_length);
        const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.rod_count))));
        for (std::size_t i = 0; i < cfg.rod_count; ++i) {
            const double gx = static_cast<double>(i % cols) * (cfg.rod_length + gap);
            const double gy = static_cast<double>(i / cols) * gap;
            rods.push_back(straight_rod(sc.disc, {gx, gy, cfg.wall_clearance}, {1, 0, 0}, {0, 1, 0}));
        }
        return rods;
    }

    std::mt19937_64 rng(cfg.seed);
    const double box_xy = 4.0 * cfg.rod_length;
    const double dz = cfg.wall_clearance;
    const double min_sep = 2.0 * sc.lj.sigma;
    for (std::size_t i = 0; i < cfg.rod_count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            const Vec3 centre{box_xy * uniform01(rng), box_xy * uniform01(rng), dz + 2.0 * cfg.rod_length * uniform01(rng)};
            const Vec3 axis = random_unit(rng);
            const Vec3 start = centre - (0.5 * cfg.rod_length) * axis;
            RodState rod = straight_rod(sc.disc, start, axis, any_normal(axis));

            bool ok = true;
            for (const auto& x : rod.x) {
                if (x.z < 0.5 * dz) {
                    ok = false;
                    break;
                }
            }
            for (std::size_t j = 0; ok && j < rods.size(); ++j) {
                if (min_pair_distance(rod, rods[j]) < min_sep) ok = false;
            }
            if (ok) {
                rods.push_back(std::move(rod));
                placed = true;
            }
        }
        if (!placed) {
            throw std::runtime_error(
                "build_initial_state: placement failed after 10000 attempts; enlarge the domain or reduce rod count");
        }
    }
    return rods;
}

}  // namespace pintswim
