#include "pintswim/rod.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "pintswim/rotation.hpp"

namespace pintswim {

double RodState::triad_residual() const {
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        Mat3 d;
        for (std::size_t c = 0; c < 3; ++c) {
            d(c, 0) = d1[k][c];
            d(c, 1) = d2[k][c];
            d(c, 2) = d3[k][c];
        }
        worst = std::max(worst, frobenius_norm(transpose(d) * d - Mat3::identity()));
    }
    return worst;
}

double WaveformParams::wavenumber() const { return 2.0 * M_PI / wavelength; }

Vec3 preferred_strain(double s, double t, const WaveformParams& w) {
    const double k = w.wavenumber();
    return {0.0, -k * k * w.amplitude * std::sin(k * s + w.frequency * t), 0.0};
}

double LJParams::cutoff() const { return std::pow(2.0, 1.0 / 6.0) * sigma; }

InternalLoads internal_loads(const RodState& state, const RodDiscretization& disc,
                             const MaterialParams& mat, const WaveformParams& wave, double t) {
    const std::size_t m = state.node_count();
    if (m < 2 || disc.node_count != m) {
        throw std::invalid_argument("internal_loads: state/discretization mismatch");
    }
    const double ds = disc.ds();
    const double inv_ds = 1.0 / ds;
    const double a_mod[3] = {mat.a1, mat.a2, mat.a3};
    const double b_mod[3] = {mat.b1, mat.b2, mat.b3};

    InternalLoads out;
    out.force.resize(m - 1);
    out.moment.resize(m - 1);

    for (std::size_t k = 0; k + 1 < m; ++k) {
        const Vec3 dx = state.x[k + 1] - state.x[k];
        if (norm2(dx) == 0.0) {
            throw std::runtime_error("internal_loads: degenerate segment (coincident nodes)");
        }
        const Vec3 tangent = dx * inv_ds;

        const Vec3 lo[3] = {state.d1[k], state.d2[k], state.d3[k]};
        const Vec3 hi[3] = {state.d1[k + 1], state.d2[k + 1], state.d3[k + 1]};

        // A_k maps the frame at node k onto the frame at node k+1.
        Mat3 a = Mat3::zero();
        for (int j = 0; j < 3; ++j) a += outer(hi[j], lo[j]);
        const Mat3 half = sqrt_rotation(a);
        const Vec3 mid[3] = {half * lo[0], half * lo[1], half * lo[2]};

        const Vec3 omega = preferred_strain((static_cast<double>(k) + 0.5) * ds, t, wave);

        Vec3 f{}, n{};
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3;
            const int kk = (i + 2) % 3;
            const double stretch = dot(tangent, mid[i]) - (i == 2 ? 1.0 : 0.0);
            const double bend = dot((hi[j] - lo[j]) * inv_ds, mid[kk]) - omega[i];
            f += (b_mod[i] * stretch) * mid[i];
            n += (a_mod[i] * bend) * mid[i];
        }
        out.force[k] = f;
        out.moment[k] = n;
    }
    return out;
}

LoadSet nodal_loads(const RodState& state, const RodDiscretization& disc, const InternalLoads& loads) {
    const std::size_t m = state.node_count();
    if (loads.force.size() != m - 1 || loads.moment.size() != m - 1) {
        throw std::invalid_argument("nodal_loads: internal loads sized for a different rod");
    }
    const double inv_ds = 1.0 / disc.ds();

    LoadSet out;
    out.f.resize(m);
    out.n.resize(m);
    const Vec3 zero{};
    for (std::size_t k = 0; k < m; ++k) {
        const Vec3& f_plus = (k < m - 1) ? loads.force[k] : zero;
        const Vec3& f_minus = (k > 0) ? loads.force[k - 1] : zero;
        const Vec3& n_plus = (k < m - 1) ? loads.moment[k] : zero;
        const Vec3& n_minus = (k > 0) ? loads.moment[k - 1] : zero;

        out.f[k] = (f_plus - f_minus) * inv_ds;

        Vec3 torque = (n_plus - n_minus) * inv_ds;
        if (k < m - 1) torque += 0.5 * cross((state.x[k + 1] - state.x[k]) * inv_ds, f_plus);
        if (k > 0) torque += 0.5 * cross((state.x[k] - state.x[k - 1]) * inv_ds, f_minus);
        out.n[k] = torque;
    }
    return out;
}

namespace {

std::atomic<long> lj_near_collisions{0};

// -dU/dr / r for U = 4w[(s/r)^12 - (s/r)^6]; positive = repulsive.
double lj_force_over_r(double r, const LJParams& lj) {
    const double sr2 = (lj.sigma * lj.sigma) / (r * r);
    const double sr6 = sr2 * sr2 * sr2;
    return 24.0 * lj.well_depth * (2.0 * sr6 * sr6 - sr6) / (r * r);
}

}  // namespace

std::vector<Vec3> lj_repulsion(const std::vector<RodState>& rods, const LJParams& lj,
                               std::size_t self_exclusion) {
    std::size_t total = 0;
    for (const auto& r : rods) total += r.node_count();
    std::vector<Vec3> forces(total);
    if (rods.size() < 2) return forces;

    const std::size_t excl = std::max<std::size_t>(self_exclusion, 4);
    const double rc = lj.cutoff();
    const double rc2 = rc * rc;
    const double r_min = 1e-3 * lj.sigma;
    const double cap = lj_force_over_r(r_min, lj) * r_min;  // magnitude at the clamp radius

    std::vector<std::size_t> offset(rods.size());
    {
        std::size_t acc = 0;
        for (std::size_t r = 0; r < rods.size(); ++r) {
            offset[r] = acc;
            acc += rods[r].node_count();
        }
    }

    for (std::size_t ra = 0; ra < rods.size(); ++ra) {
        for (std::size_t rb = ra; rb < rods.size(); ++rb) {
            const auto& a = rods[ra];
            const auto& b = rods[rb];
            for (std::size_t i = 0; i < a.node_count(); ++i) {
                const std::size_t j0 = (ra == rb) ? i + excl : 0;
                for (std::size_t j = j0; j < b.node_count(); ++j) {
                    Vec3 d = a.x[i] - b.x[j];
                    double r2 = norm2(d);
                    if (r2 >= rc2) continue;
                    double r = std::sqrt(r2);
                    Vec3 force;
                    if (r < r_min) {
                        if (lj_near_collisions.fetch_add(1) == 0) {
                            std::fprintf(stderr, "lj_repulsion: near-collision, clamping pair distance\n");
                        }
                        const Vec3 dir = (r > 0.0) ? d / r : Vec3{1, 0, 0};
                        force = cap * dir;
                    } else {
                        force = lj_force_over_r(r, lj) * d;
                    }
                    forces[offset[ra] + i] += force;
                    forces[offset[rb] + j] -= force;
                }
            }
        }
    }
    return forces;
}

std::size_t reorthonormalize(RodState& state, double tol) {
    std::size_t touched = 0;
    for (std::size_t k = 0; k < state.node_count(); ++k) {
        Mat3 d;
        for (std::size_t c = 0; c < 3; ++c) {
            d(c, 0) = state.d1[k][c];
            d(c, 1) = state.d2[k][c];
            d(c, 2) = state.d3[k][c];
        }
        if (frobenius_norm(transpose(d) * d - Mat3::identity()) <= tol) continue;
        Vec3 t3 = normalized(state.d3[k]);
        Vec3 t1 = state.d1[k] - dot(state.d1[k], t3) * t3;
        t1 = normalized(t1);
        state.d3[k] = t3;
        state.d1[k] = t1;
        state.d2[k] = cross(t3, t1);
        ++touched;
    }
    return touched;
}

}  // namespace pintswim
