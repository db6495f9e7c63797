#include "pintswim/stokes.hpp"

#include <cmath>
#include <stdexcept>

namespace pintswim {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_inputs(std::span<const Vec3> sources, const LoadSet& loads, const KernelParams& kp) {
    if (kp.epsilon <= 0.0 || kp.mu <= 0.0) {
        throw std::invalid_argument("stokes: epsilon and mu must be positive");
    }
    if (kp.wall_mode == WallMode::image_wall) {
        throw std::runtime_error("stokes: image_wall correction is not implemented; use free_space");
    }
    if (loads.f.size() != sources.size() || loads.n.size() != sources.size()) {
        throw std::invalid_argument("stokes: load arrays must match source count");
    }
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (!std::isfinite(dot(loads.f[i], loads.f[i])) || !std::isfinite(dot(loads.n[i], loads.n[i]))) {
            throw std::invalid_argument("stokes: non-finite load entry");
        }
    }
}

// One source contribution at separation r = target - source.
inline void accumulate(const Vec3& r, const Vec3& f, const Vec3& n, double eps, Vec3& u, Vec3& w) {
    const double r2 = dot(r, r);
    const double e2 = eps * eps;
    const double big_r2 = r2 + e2;
    const double big_r = std::sqrt(big_r2);
    const double inv_r3 = 1.0 / (big_r2 * big_r);
    const double inv_r5 = inv_r3 / big_r2;
    const double inv_r7 = inv_r5 / big_r2;

    const double h1 = (r2 + 2.0 * e2) * (1.0 / (8.0 * kPi)) * inv_r3;
    const double h2 = (1.0 / (8.0 * kPi)) * inv_r3;
    const double h3 = (2.0 * r2 + 5.0 * e2) * (1.0 / (16.0 * kPi)) * inv_r5;
    const double h4 = (10.0 * e2 * e2 - 7.0 * e2 * r2 - 2.0 * r2 * r2) * (1.0 / (32.0 * kPi)) * inv_r7;
    const double h5 = (6.0 * r2 + 21.0 * e2) * (1.0 / (32.0 * kPi)) * inv_r7;

    const double fr = dot(f, r);
    const double nr = dot(n, r);
    const Vec3 nxr = cross(n, r);
    const Vec3 fxr = cross(f, r);

    u.x += f.x * h1 + fr * r.x * h2 + nxr.x * h3;
    u.y += f.y * h1 + fr * r.y * h2 + nxr.y * h3;
    u.z += f.z * h1 + fr * r.z * h2 + nxr.z * h3;
    w.x += fxr.x * h3 + n.x * h4 + nr * r.x * h5;
    w.y += fxr.y * h3 + n.y * h4 + nr * r.y * h5;
    w.z += fxr.z * h3 + n.z * h4 + nr * r.z * h5;
}

}  // namespace

HValues h_functions(double r, double epsilon) {
    if (r < 0.0 || epsilon <= 0.0) {
        throw std::invalid_argument("h_functions: r >= 0 and epsilon > 0 required");
    }
    const double r2 = r * r;
    const double e2 = epsilon * epsilon;
    const double big_r = std::sqrt(r2 + e2);
    const double r3 = big_r * big_r * big_r;
    const double r5 = r3 * big_r * big_r;
    const double r7 = r5 * big_r * big_r;
    return {(r2 + 2.0 * e2) / (8.0 * kPi * r3),
            1.0 / (8.0 * kPi * r3),
            (2.0 * r2 + 5.0 * e2) / (16.0 * kPi * r5),
            (10.0 * e2 * e2 - 7.0 * e2 * r2 - 2.0 * r2 * r2) / (32.0 * kPi * r7),
            (6.0 * r2 + 21.0 * e2) / (32.0 * kPi * r7)};
}

VelocityField evaluate_velocities(std::span<const Vec3> targets, std::span<const Vec3> sources,
                                  const LoadSet& loads, const KernelParams& kp) {
    check_inputs(sources, loads, kp);
    VelocityField out;
    out.u.resize(targets.size());
    out.omega.resize(targets.size());
    const double inv_mu = 1.0 / kp.mu;
    const auto n_targets = static_cast<std::ptrdiff_t>(targets.size());

#pragma omp parallel for schedule(static) if (n_targets * static_cast<std::ptrdiff_t>(sources.size()) > 4096)
    for (std::ptrdiff_t i = 0; i < n_targets; ++i) {
        Vec3 u{}, w{};
        for (std::size_t j = 0; j < sources.size(); ++j) {
            accumulate(targets[i] - sources[j], loads.f[j], loads.n[j], kp.epsilon, u, w);
        }
        out.u[i] = u * inv_mu;
        out.omega[i] = w * inv_mu;
    }
    return out;
}

VelocityField evaluate_velocities_serial(std::span<const Vec3> targets, std::span<const Vec3> sources,
                                         const LoadSet& loads, const KernelParams& kp) {
    check_inputs(sources, loads, kp);
    VelocityField out;
    out.u.resize(targets.size());
    out.omega.resize(targets.size());
    const double inv_mu = 1.0 / kp.mu;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        Vec3 u{}, w{};
        for (std::size_t j = 0; j < sources.size(); ++j) {
            accumulate(targets[i] - sources[j], loads.f[j], loads.n[j], kp.epsilon, u, w);
        }
        out.u[i] = u * inv_mu;
        out.omega[i] = w * inv_mu;
    }
    return out;
}

std::vector<double> assemble_grand_mobility(std::span<const Vec3> nodes, const KernelParams& kp,
                                            std::size_t node_cap) {
    if (kp.epsilon <= 0.0 || kp.mu <= 0.0) {
        throw std::invalid_argument("stokes: epsilon and mu must be positive");
    }
    if (kp.wall_mode == WallMode::image_wall) {
        throw std::runtime_error("stokes: image_wall correction is not implemented; use free_space");
    }
    const std::size_t n = nodes.size();
    if (n > node_cap) {
        throw std::invalid_argument("assemble_grand_mobility: node count exceeds cap (diagnostic path)");
    }
    const std::size_t dim = 6 * n;
    std::vector<double> mat(dim * dim, 0.0);
    const double inv_mu = 1.0 / kp.mu;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Vec3 r = nodes[i] - nodes[j];
            const auto h = h_functions(norm(r), kp.epsilon);
            const Mat3 rr = outer(r, r);
            const Mat3 rx = skew(r);
            // 6x6 block: [u; w] = (1/mu) [[H1 I + H2 rr^T, -H3 [r]x],
            //                             [-H3 [r]x,  H4 I + H5 rr^T]] [f; n]
            const Mat3 uu = h.h1 * Mat3::identity() + h.h2 * rr;
            const Mat3 un = -h.h3 * rx;  // (n x r) = -[r]x n
            const Mat3 wf = -h.h3 * rx;  // (f x r) = -[r]x f
            const Mat3 ww = h.h4 * Mat3::identity() + h.h5 * rr;
            for (std::size_t a = 0; a < 3; ++a) {
                for (std::size_t b = 0; b < 3; ++b) {
                    mat[(6 * i + a) * dim + (6 * j + b)] = uu(a, b) * inv_mu;
                    mat[(6 * i + a) * dim + (6 * j + 3 + b)] = un(a, b) * inv_mu;
                    mat[(6 * i + 3 + a) * dim + (6 * j + b)] = wf(a, b) * inv_mu;
                    mat[(6 * i + 3 + a) * dim + (6 * j + 3 + b)] = ww(a, b) * inv_mu;
                }
            }
        }
    }
    return mat;
}

}  // namespace pintswim
