// Compares the OpenMP mobility evaluation against its serial twin over
// growing system sizes, and times one full rhs at the desk scale.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pintswim/propagators.hpp"
#include "pintswim/scenario.hpp"
#include "pintswim/stokes.hpp"

using namespace pintswim;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_ms(F&& fn, int reps) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif

    std::mt19937_64 rng(7);
    auto rand3 = [&rng] {
        auto u = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
        return Vec3{u(), u(), u()};
    };

    std::printf("\nmobility sum, parallel vs serial (best of 5):\n");
    std::printf("%8s %12s %12s %9s %10s\n", "N", "omp (ms)", "serial (ms)", "speedup", "match");
    const KernelParams kp{0.1, 1.0, WallMode::free_space};
    for (const std::size_t n : {128, 256, 512, 1024, 2048}) {
        std::vector<Vec3> nodes(n);
        LoadSet loads;
        loads.f.resize(n);
        loads.n.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            nodes[i] = rand3();
            loads.f[i] = rand3();
            loads.n[i] = rand3();
        }
        VelocityField a, b;
        const double t_omp = time_best_ms([&] { a = evaluate_velocities(nodes, nodes, loads, kp); }, 5);
        const double t_ser =
            time_best_ms([&] { b = evaluate_velocities_serial(nodes, nodes, loads, kp); }, 5);
        bool identical = true;
        for (std::size_t i = 0; i < n && identical; ++i) {
            identical = a.u[i].x == b.u[i].x && a.u[i].y == b.u[i].y && a.u[i].z == b.u[i].z &&
                        a.omega[i].x == b.omega[i].x && a.omega[i].y == b.omega[i].y &&
                        a.omega[i].z == b.omega[i].z;
        }
        std::printf("%8zu %12.3f %12.3f %8.2fx %10s\n", n, t_omp, t_ser, t_ser / t_omp,
                    identical ? "bitwise" : "DIFFER");
    }

    std::printf("\nfull rhs at desk scale (best of 20):\n");
    for (const std::size_t rods : {1, 4, 12, 25}) {
        ScenarioConfig cfg;
        cfg.rod_count = rods;
        cfg.nodes_per_rod = 51;
        cfg.lj_well_depth = rods > 1 ? 0.01 : 0.0;
        cfg.placement = rods > 1 ? Placement::random : Placement::grid;
        const auto sc = make_scenario(cfg);
        const auto state = build_initial_state(sc);
        SystemVelocities vel;
        const double t = time_best_ms([&] { vel = rhs(state, 0.0, sc); }, 20);
        std::printf("  %2zu rod(s), N = %4zu: %8.3f ms\n", rods, rods * cfg.nodes_per_rod, t);
    }
    return 0;
}
