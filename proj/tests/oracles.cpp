#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "pintswim/rotation.hpp"

namespace oracles {

namespace {

constexpr double kPi = 3.14159265358979323846;

double blob(double s, double eps) {
    const double q = s * s + eps * eps;
    return 15.0 * eps * eps * eps * eps / (8.0 * kPi * q * q * q * std::sqrt(q));
}

// Composite 16-point Gauss-Legendre.
double integrate(const std::function<double(double)>& f, double a, double b, int panels) {
    static const double xg[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                 0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                 0.9445750230732326, 0.9894009349916499};
    static const double wg[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                 0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                 0.0622535239386479, 0.0271524594117541};
    double total = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        double acc = 0.0;
        for (int i = 0; i < 8; ++i) {
            acc += wg[i] * (f(mid + half * xg[i]) + f(mid - half * xg[i]));
        }
        total += acc * half;
    }
    return total;
}

// int_r^inf s*blob ds, splitting at R_max with a 3-term asymptotic tail.
double tail_integral_s_blob(double r, double eps) {
    const double r_max = 80.0 * eps;
    const double c = 15.0 * eps * eps * eps * eps / (8.0 * kPi);
    const double tail = c * (1.0 / (5.0 * std::pow(r_max, 5)) - eps * eps / (2.0 * std::pow(r_max, 7)) +
                             7.0 * std::pow(eps, 4) / (8.0 * std::pow(r_max, 9)));
    if (r >= r_max) {
        return c * (1.0 / (5.0 * std::pow(r, 5)) - eps * eps / (2.0 * std::pow(r, 7)) +
                    7.0 * std::pow(eps, 4) / (8.0 * std::pow(r, 9)));
    }
    const int panels = std::max(64, static_cast<int>((r_max - r) / (0.25 * eps)));
    return integrate([&](double s) { return s * blob(s, eps); }, r, r_max, panels) + tail;
}

double cum_s2_blob(double r, double eps) {
    const int panels = std::max(32, static_cast<int>(r / (0.25 * eps)));
    return integrate([&](double s) { return s * s * blob(s, eps); }, 0.0, r, panels);
}

// Newton potential of the (radial, unit-mass) blob: Laplacian(G) = blob.
double g_value(double r, double eps) { return -(cum_s2_blob(r, eps) / r + tail_integral_s_blob(r, eps)); }

}  // namespace

pintswim::HValues h_quadrature(double r, double eps) {
    if (r <= 0.0) throw std::invalid_argument("h_quadrature: use a small positive r for the origin checks");
    const double phi = blob(r, eps);
    const double g = g_value(r, eps);
    const double gp = cum_s2_blob(r, eps) / (r * r);
    // B' from Laplacian(B) = G; the inner G values are themselves quadratures.
    const int panels = std::max(48, static_cast<int>(r / (0.2 * eps)));
    const double bp =
        integrate([&](double s) { return s * s * g_value(s, eps); }, 1e-12 * eps, r, panels) / (r * r);
    const double bpp = g - 2.0 * bp / r;  // from the radial Laplacian identity

    pintswim::HValues h;
    h.h1 = bp / r - g;
    h.h2 = (bpp - bp / r) / (r * r);
    h.h3 = gp / (2.0 * r);
    h.h4 = 0.25 * (phi - gp / r);        // uses G'' = blob - 2G'/r
    h.h5 = (3.0 * gp - r * phi) / (4.0 * r * r * r);
    return h;
}

pintswim::VelocityField dense_mobility_apply(const std::vector<Vec3>& nodes, const pintswim::LoadSet& loads,
                                             const pintswim::KernelParams& kp) {
    const std::size_t n = nodes.size();
    const double eps = kp.epsilon;
    pintswim::VelocityField out;
    out.u.assign(n, {});
    out.omega.assign(n, {});

    for (std::size_t i = 0; i < n; ++i) {
        double u[3] = {0, 0, 0};
        double w[3] = {0, 0, 0};
        for (std::size_t j = 0; j < n; ++j) {
            const double rv[3] = {nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y, nodes[i].z - nodes[j].z};
            const double r2 = rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2];
            const double r = std::sqrt(r2);
            const double cap_r = std::sqrt(r2 + eps * eps);
            // Independent route: radial solutions of the two Poisson problems.
            const double g = -(3.0 * eps * eps + 2.0 * r2) / (8.0 * kPi * std::pow(cap_r, 3));
            const double gp = r * (5.0 * eps * eps + 2.0 * r2) / (8.0 * kPi * std::pow(cap_r, 5));
            const double bp = -r / (8.0 * kPi * cap_r);
            const double bpp = -eps * eps / (8.0 * kPi * std::pow(cap_r, 3));
            const double phi = blob(r, eps);

            // At r = 0 the h2/h3/h5 terms multiply vanishing geometric factors,
            // so only the B'/r -> B''(0) and G'/r -> blob(0)/3 limits matter.
            const double h1 = r == 0.0 ? bpp - g : bp / r - g;
            const double h2 = r == 0.0 ? 0.0 : (bpp - bp / r) / r2;
            const double h3 = r == 0.0 ? 0.0 : gp / (2.0 * r);
            const double h4 = r == 0.0 ? 0.25 * (phi - phi / 3.0) : 0.25 * (phi - gp / r);
            const double h5 = r == 0.0 ? 0.0 : (3.0 * gp - r * phi) / (4.0 * r2 * r);

            const double f[3] = {loads.f[j].x, loads.f[j].y, loads.f[j].z};
            const double t[3] = {loads.n[j].x, loads.n[j].y, loads.n[j].z};
            double fr = 0.0, tr = 0.0;
            for (int a = 0; a < 3; ++a) {
                fr += f[a] * rv[a];
                tr += t[a] * rv[a];
            }
            const double nxr[3] = {t[1] * rv[2] - t[2] * rv[1], t[2] * rv[0] - t[0] * rv[2],
                                   t[0] * rv[1] - t[1] * rv[0]};
            const double fxr[3] = {f[1] * rv[2] - f[2] * rv[1], f[2] * rv[0] - f[0] * rv[2],
                                   f[0] * rv[1] - f[1] * rv[0]};
            for (int a = 0; a < 3; ++a) {
                u[a] += f[a] * h1 + fr * rv[a] * h2 + nxr[a] * h3;
                w[a] += fxr[a] * h3 + t[a] * h4 + tr * rv[a] * h5;
            }
        }
        for (int a = 0; a < 3; ++a) {
            out.u[i][a] = u[a] / kp.mu;
            out.omega[i][a] = w[a] / kp.mu;
        }
    }
    return out;
}

double elastic_energy(const pintswim::RodState& state, const pintswim::RodDiscretization& disc,
                      const pintswim::MaterialParams& mat, const pintswim::WaveformParams& wave, double t) {
    const std::size_t m = state.node_count();
    const double ds = disc.ds();
    const double a_mod[3] = {mat.a1, mat.a2, mat.a3};
    const double b_mod[3] = {mat.b1, mat.b2, mat.b3};
    double energy = 0.0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        const Vec3 tangent = (state.x[k + 1] - state.x[k]) / ds;
        const Vec3 lo[3] = {state.d1[k], state.d2[k], state.d3[k]};
        const Vec3 hi[3] = {state.d1[k + 1], state.d2[k + 1], state.d3[k + 1]};
        pintswim::Mat3 a = pintswim::Mat3::zero();
        for (int j = 0; j < 3; ++j) a += pintswim::outer(hi[j], lo[j]);
        const pintswim::Mat3 half = pintswim::sqrt_rotation(a);
        const Vec3 mid[3] = {half * lo[0], half * lo[1], half * lo[2]};
        const Vec3 omega = pintswim::preferred_strain((static_cast<double>(k) + 0.5) * ds, t, wave);
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3;
            const int kk = (i + 2) % 3;
            const double stretch = dot(tangent, mid[i]) - (i == 2 ? 1.0 : 0.0);
            const double bend = dot((hi[j] - lo[j]) / ds, mid[kk]) - omega[i];
            energy += 0.5 * ds * (b_mod[i] * stretch * stretch + a_mod[i] * bend * bend);
        }
    }
    return energy;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n) {
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = 0.5 * (at(q, q) - at(p, p)) / apq;
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

pintswim::RodState perturbed_rod(const pintswim::RodDiscretization& disc, std::mt19937_64& rng,
                                 double position_jitter, double angle_jitter) {
    const std::size_t m = disc.node_count;
    const double ds = disc.ds();
    pintswim::RodState rod;
    rod.x.resize(m);
    rod.d1.resize(m);
    rod.d2.resize(m);
    rod.d3.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        rod.x[k] = Vec3{static_cast<double>(k) * ds, 0.0, 0.0} + random_vec(rng, position_jitter * ds);
        const pintswim::Rot3 q =
            pintswim::from_axis_angle({random_unit(rng), uniform(rng, 0.0, angle_jitter)});
        rod.d1[k] = q * Vec3{0, 1, 0};
        rod.d2[k] = q * Vec3{0, 0, 1};
        rod.d3[k] = q * Vec3{1, 0, 0};
    }
    return rod;
}

}  // namespace oracles
