// Command-line harness: scenario I/O, parareal runs, and the desk-scale
// experiment runners (gap vs 1/r, weak/strong scaling, rotation-sqrt stats).
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "pintswim/cost_model.hpp"
#include "pintswim/harness.hpp"
#include "pintswim/io.hpp"
#include "pintswim/rotation.hpp"

using namespace pintswim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConverge = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumerical = 4;

struct CommonOpts {
    std::string config_path;
    std::string output_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 0;  // 0 = keep config seed
    bool seed_set = false;
};

RunConfig load_run_config(const CommonOpts& opts) {
    RunConfig cfg = load_config(opts.config_path);
    if (opts.seed_set) cfg.scenario.seed = opts.seed;
    return cfg;
}

std::string out_path(const CommonOpts& opts, const std::string& name) {
    std::filesystem::create_directories(opts.output_dir);
    return (std::filesystem::path(opts.output_dir) / name).string();
}

/// PINT_SWIMMER_THREADS caps the configured pool; an explicit --workers wins.
int resolve_workers(int configured, bool flag_given) {
    if (flag_given) return configured;
    if (const char* env = std::getenv("PINT_SWIMMER_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) return std::min(configured, cap);
        } catch (...) {
            std::cerr << "warning: ignoring non-numeric PINT_SWIMMER_THREADS\n";
        }
    }
    return configured;
}

double wall_seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonOpts& opts) {
    const RunConfig cfg = load_run_config(opts);
    const auto sc = make_scenario(cfg.scenario);
    auto state = build_initial_state(sc);
    const std::string tag = run_tag(cfg);

    const double dt = cfg.scenario.fine_dt;
    const double span = cfg.scenario.horizon;
    const auto steps = static_cast<std::size_t>(std::llround(span / dt));
    if (steps == 0 || std::abs(span / dt - static_cast<double>(steps)) > 1e-9 * steps) {
        throw ConfigError("simulate: horizon must be an integral number of fine_dt steps");
    }

    timing::reset();
    RunRecord rec;
    rec.config = cfg;
    rec.command = "simulate";

    const std::string traj_path = out_path(opts, "traj_" + tag + ".bin");
    TrajectoryWriter writer(traj_path, cfg);
    writer.append(0.0, state);
    rec.wall_seconds = wall_seconds([&] {
        double t = 0.0;
        for (std::size_t i = 0; i < steps; ++i) {
            state = step_rk2(state, t, dt, sc);
            t += dt;
            if ((i + 1) % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || i + 1 == steps) {
                writer.append(t, state);
            }
        }
    });
    writer.close();
    rec.artifacts.push_back(traj_path);

    if (opts.format == "csv") {
        const std::string csv_path = out_path(opts, "traj_" + tag + ".csv");
        export_trajectory_csv(traj_path, csv_path);
        rec.artifacts.push_back(csv_path);
    }

    rec.timings = timing::snapshot();
    const std::string rec_path = out_path(opts, "record_simulate_" + tag + ".json");
    rec.save(rec_path);
    std::cout << "simulate: " << writer.frame_count() << " frames over " << steps << " steps -> "
              << traj_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct PararealOutcome {
    parareal::RunResult result;
    double wall = 0.0;
};

PararealOutcome run_physics_parareal(const RunConfig& cfg, const std::vector<parareal::Vec>* reference) {
    const auto run = harness::prepare(cfg);
    PararealOutcome out;
    out.wall = wall_seconds([&] {
        out.result = parareal::run(run.plan, run.coarse, run.fine, run.x0, rod_position_metric(), reference);
    });
    return out;
}

void write_convergence_csv(const std::string& path, const parareal::ConvergenceReport& report) {
    std::ofstream csv(path);
    csv.precision(17);
    csv << "iteration,eta_tilde" << (report.eta.empty() ? "" : ",eta") << "\n";
    for (std::size_t k = 0; k < report.eta_tilde.size(); ++k) {
        csv << (k + 1) << ',' << report.eta_tilde[k];
        if (!report.eta.empty()) csv << ',' << report.eta[k];
        csv << "\n";
    }
}

int cmd_parareal(const CommonOpts& opts, RunConfig cfg, bool with_reference, bool check_both) {
    const std::string tag = run_tag(cfg);
    timing::reset();

    std::vector<parareal::Vec> reference;
    const std::vector<parareal::Vec>* ref_ptr = nullptr;
    if (with_reference) {
        reference = harness::serial_fine_boundaries(harness::prepare(cfg));
        ref_ptr = &reference;
    }

    const auto primary = run_physics_parareal(cfg, ref_ptr);

    RunRecord rec;
    rec.config = cfg;
    rec.command = "parareal";
    rec.eta_tilde = primary.result.report.eta_tilde;
    rec.eta = primary.result.report.eta;
    rec.iterations_used = primary.result.report.iterations_used;
    rec.converged = primary.result.report.converged;
    rec.wall_seconds = primary.wall;
    rec.schedule_idle = primary.result.trace.total_idle();
    rec.timings = timing::snapshot();

    const std::string conv_path = out_path(opts, "convergence_" + tag + ".csv");
    write_convergence_csv(conv_path, primary.result.report);
    rec.artifacts.push_back(conv_path);

    const std::string sched_path = out_path(opts, "schedule_" + tag + ".csv");
    write_schedule_csv(sched_path, primary.result.trace);
    rec.artifacts.push_back(sched_path);

    if (check_both) {
        RunConfig other = cfg;
        other.mode = cfg.mode == parareal::Mode::regular ? parareal::Mode::pipelined
                                                         : parareal::Mode::regular;
        const auto secondary = run_physics_parareal(other, ref_ptr);
        bool identical = primary.result.states.size() == secondary.result.states.size() &&
                         primary.result.report.eta_tilde == secondary.result.report.eta_tilde;
        for (std::size_t n = 0; identical && n < primary.result.states.size(); ++n) {
            identical = primary.result.states[n] == secondary.result.states[n];
        }
        std::cout << "mode-equivalence: " << (identical ? "identical iterates and states" : "MISMATCH")
                  << "\n";
        if (!identical) {
            rec.save(out_path(opts, "record_parareal_" + tag + ".json"));
            std::cerr << "parareal: regular and pipelined runs disagree\n";
            return 1;
        }
        const std::string other_sched = out_path(opts, "schedule_" + tag + "_other_mode.csv");
        write_schedule_csv(other_sched, secondary.result.trace);
        rec.artifacts.push_back(other_sched);
    }

    rec.save(out_path(opts, "record_parareal_" + tag + ".json"));
    std::cout << "parareal: " << (rec.converged ? "converged" : "not converged") << " after "
              << rec.iterations_used << " iteration(s); W = " << rec.schedule_idle
              << " s, wall = " << rec.wall_seconds << " s\n";
    for (std::size_t k = 0; k < rec.eta_tilde.size(); ++k) {
        std::cout << "  iter " << (k + 1) << ": eta_tilde = " << rec.eta_tilde[k];
        if (!rec.eta.empty()) std::cout << ", eta = " << rec.eta[k];
        std::cout << "\n";
    }
    return rec.converged ? kExitOk : kExitNoConverge;
}

// ---------------------------------------------------------------------------

int cmd_gap(const CommonOpts& opts, RunConfig cfg, std::vector<double> ratios, bool live) {
    if (ratios.size() < 3) {
        std::cerr << "gap: need at least 3 ratios for the 1/r fit\n";
        return kExitConfig;
    }
    std::sort(ratios.begin(), ratios.end());
    const std::string tag = run_tag(cfg);
    const std::string csv_path = out_path(opts, "gap_" + tag + ".csv");
    std::ofstream csv(csv_path);
    csv.precision(17);
    csv << "r,mode,W,wall_time\n";

    std::vector<std::pair<double, double>> points;
    for (const double r : ratios) {
        double w_reg = 0, w_pipe = 0, wall_reg = 0, wall_pipe = 0;
        if (live) {
            RunConfig c = cfg;
            c.ratio = r;
            c.tolerance = 1e-300;  // fixed iteration count keeps the comparison fair
            c.mode = parareal::Mode::regular;
            const auto reg = run_physics_parareal(c, nullptr);
            c.mode = parareal::Mode::pipelined;
            const auto pipe = run_physics_parareal(c, nullptr);
            w_reg = reg.result.trace.total_idle();
            w_pipe = pipe.result.trace.total_idle();
            wall_reg = reg.wall;
            wall_pipe = pipe.wall;
        } else {
            cost_model::CostInputs ci{cfg.intervals, cfg.workers,
                                      std::min(cfg.max_iterations, cfg.intervals),
                                      static_cast<double>(cfg.intervals), r};
            const auto reg = cost_model::simulate_schedule(ci, cost_model::Mode::regular);
            const auto pipe = cost_model::simulate_schedule(ci, cost_model::Mode::pipelined);
            w_reg = reg.total_idle();
            w_pipe = pipe.total_idle();
            wall_reg = reg.makespan();
            wall_pipe = pipe.makespan();
        }
        csv << r << ",regular," << w_reg << ',' << wall_reg << "\n";
        csv << r << ",pipelined," << w_pipe << ',' << wall_pipe << "\n";
        points.push_back({r, live ? wall_reg - wall_pipe : w_reg - w_pipe});
    }

    const auto fit = cost_model::fit_gap_vs_inv_r(points);
    std::cout << "gap fit vs 1/r: slope = " << fit.slope << ", intercept = " << fit.intercept
              << ", R^2 = " << fit.r_squared << "\n";
    for (const auto& [r, gap] : points) std::cout << "  r = " << r << ": gap = " << gap << "\n";
    std::cout << "rows -> " << csv_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_scaling(const CommonOpts& opts, RunConfig cfg, std::vector<int> workers, bool weak, bool live) {
    if (workers.empty() || workers.front() != 1 || !std::is_sorted(workers.begin(), workers.end())) {
        std::cerr << "scaling: --workers must be an ascending list starting at 1\n";
        return kExitConfig;
    }
    const std::string tag = run_tag(cfg);
    const std::string csv_path =
        out_path(opts, std::string(weak ? "weak" : "strong") + "_scaling_" + tag + ".csv");
    std::ofstream csv(csv_path);
    csv.precision(17);
    csv << (weak ? "p,horizon,intervals,time,speedup,efficiency,iterations\n"
                 : "p,time,speedup,efficiency,iterations\n");

    double t1 = 0.0;
    for (const int p : workers) {
        RunConfig c = cfg;
        c.workers = p;
        if (weak) {
            c.scenario.horizon = cfg.scenario.horizon * p;  // hold per-worker intervals fixed
            c.intervals = cfg.intervals * p;
        }
        double time = 0.0;
        int iterations = 0;
        if (live) {
            const auto run = run_physics_parareal(c, nullptr);
            time = run.wall;
            iterations = run.result.report.iterations_used;
        } else {
            cost_model::CostInputs ci{c.intervals, c.workers, std::min(c.max_iterations, c.intervals),
                                      static_cast<double>(c.intervals), c.ratio};
            time = cost_model::simulate_schedule(
                       ci, c.mode == parareal::Mode::regular ? cost_model::Mode::regular
                                                             : cost_model::Mode::pipelined)
                       .makespan();
            iterations = std::min(c.max_iterations, c.intervals);
        }
        if (p == 1) t1 = time;
        const double speedup = t1 / time * (weak ? p : 1);  // weak: scaled-size speedup
        const double efficiency = speedup / p;
        if (weak) {
            csv << p << ',' << c.scenario.horizon << ',' << c.intervals << ',' << time << ','
                << speedup << ',' << efficiency << ',' << iterations << "\n";
        } else {
            csv << p << ',' << time << ',' << speedup << ',' << efficiency << ',' << iterations << "\n";
        }
        std::cout << "p = " << p << ": time = " << time << " s, speedup = " << speedup
                  << ", efficiency = " << efficiency * 100.0 << "%"
                  << ", l = " << iterations << "\n";
    }
    std::cout << "rows -> " << csv_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_sqrt_bench(const CommonOpts& opts, int samples, std::uint64_t seed) {
    if (samples < 10) {
        std::cerr << "sqrt-bench: need at least 10 samples\n";
        return kExitConfig;
    }
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    const double z = 2.0 * uniform(0, 1) - 1.0;
    const double phi = 2.0 * M_PI * uniform(0, 1);
    const Vec3 axis{std::sqrt(1.0 - z * z) * std::cos(phi), std::sqrt(1.0 - z * z) * std::sin(phi), z};

    std::filesystem::create_directories(opts.output_dir);
    const std::string csv_path = out_path(opts, "sqrt_bench_seed" + std::to_string(seed) + ".csv");
    std::ofstream csv(csv_path);
    csv.precision(17);
    csv << "sample,theta,residual,roundtrip,time_ns\n";

    std::vector<double> residuals;
    double roundtrip_worst = 0.0;
    double total_ns = 0.0;
    for (int i = 0; i < samples; ++i) {
        double theta = uniform(-0.1, M_PI + 0.1);
        Vec3 n = axis;
        if (theta < 0.0) {
            n = -n;
            theta = -theta;
        } else if (theta > M_PI) {
            n = -n;
            theta = 2.0 * M_PI - theta;
        }
        const Rot3 r = from_axis_angle({n, theta});

        const auto t0 = std::chrono::steady_clock::now();
        const Rot3 s = sqrt_rotation(r);
        const auto t1 = std::chrono::steady_clock::now();
        const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();

        const double residual = frobenius_norm(s * s - r);
        const auto aa = to_axis_angle(r);
        const double roundtrip = frobenius_norm(from_axis_angle(aa) - r);
        residuals.push_back(residual);
        roundtrip_worst = std::max(roundtrip_worst, roundtrip);
        total_ns += ns;
        csv << i << ',' << theta << ',' << residual << ',' << roundtrip << ',' << ns << "\n";
    }

    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / samples;
    const double median = sorted[samples / 2];
    double var = 0.0;
    for (const double v : sorted) var += (v - mean) * (v - mean);
    std::cout.precision(3);
    std::cout << std::scientific;
    std::cout << "residual ||S^2 - R||_F over " << samples << " samples\n"
              << "  mean   " << mean << "\n"
              << "  median " << median << "\n"
              << "  std    " << std::sqrt(var / samples) << "\n"
              << "  max    " << sorted.back() << "\n"
              << "axis-angle round-trip max " << roundtrip_worst << "\n"
              << "mean time per call " << total_ns / samples << " ns\n"
              << "rows -> " << csv_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_schedule_sim(const CommonOpts& opts, int intervals, int workers, int iterations, double ratio,
                     double total_fine, const std::string& mode_name) {
    cost_model::CostInputs ci{intervals, workers, iterations, total_fine, ratio};
    const auto mode =
        mode_name == "regular" ? cost_model::Mode::regular : cost_model::Mode::pipelined;
    const auto trace = cost_model::simulate_schedule(ci, mode);
    const std::string csv_path = out_path(opts, "schedule_sim_" + mode_name + ".csv");
    write_schedule_csv(csv_path, trace);
    std::cout << "schedule-sim (" << mode_name << "): W = " << trace.total_idle()
              << ", makespan = " << trace.makespan() << "\n"
              << "analytic: W_reg = " << cost_model::w_regular(ci)
              << ", W_pipe = " << cost_model::w_pipelined(ci)
              << ", delta_w = " << cost_model::delta_w(ci) << "\n"
              << "events -> " << csv_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel-in-time microswimmer simulation harness"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config) {
            sub->add_option("--config", opts.config_path, "scenario/run config file")->required();
        }
        sub->add_option("--output-dir", opts.output_dir, "directory for emitted files");
        sub->add_option("--format", opts.format, "csv|json artifact flavor")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", opts.seed, "override the scenario seed")
            ->each([&](const std::string&) { opts.seed_set = true; });
    };

    auto* simulate = app.add_subcommand("simulate", "serial fine integration, trajectory reference");
    add_common(simulate, true);

    auto* prl = app.add_subcommand("parareal", "parallel-in-time run over the configured scenario");
    add_common(prl, true);
    std::string mode_name;
    int workers = 0, intervals = 0, max_iters = 0, fine_steps = 0, coarse_steps = 0;
    double ratio = 0.0, tolerance = 0.0;
    bool with_reference = false, check_both = false;
    prl->add_option("--mode", mode_name, "regular|pipelined")
        ->check(CLI::IsMember({"regular", "pipelined"}));
    auto* workers_opt = prl->add_option("--workers", workers, "worker count m");
    prl->add_option("--intervals", intervals, "time interval count n");
    prl->add_option("--ratio", ratio, "fine/coarse wall-cost ratio r");
    prl->add_option("--tol", tolerance, "stopping tolerance on eta_tilde");
    prl->add_option("--max-iterations", max_iters, "iteration cap");
    prl->add_option("--fine-steps", fine_steps, "fine RK2 steps per interval");
    prl->add_option("--coarse-steps", coarse_steps, "coarse Euler steps per interval");
    prl->add_flag("--reference", with_reference, "also compute the serial fine reference for eta");
    prl->add_flag("--check-both", check_both, "run both modes and assert identical values");

    auto* gap = app.add_subcommand("gap", "runtime/idle gap vs 1/r experiment");
    add_common(gap, true);
    std::vector<double> ratios;
    bool gap_live = false;
    gap->add_option("--ratios", ratios, "cost ratios to sweep")->delimiter(',');
    auto* gap_workers = gap->add_option("--workers", workers, "worker count m");
    gap->add_flag("--live", gap_live, "run the physics instead of the event simulator");

    auto* scaling = app.add_subcommand("scaling", "strong/weak scaling table");
    add_common(scaling, true);
    std::vector<int> worker_list;
    bool weak = false, strong = false, scaling_live = false, scaling_sim = false;
    scaling->add_option("--workers", worker_list, "ascending worker counts starting at 1")
        ->delimiter(',');
    scaling->add_flag("--weak", weak, "grow the horizon with the worker count");
    scaling->add_flag("--strong", strong, "fixed problem size");
    scaling->add_flag("--live", scaling_live, "force live physics runs");
    scaling->add_flag("--sim", scaling_sim, "force event-simulator runs");

    auto* sqrt_bench = app.add_subcommand("sqrt-bench", "rotation square-root accuracy/timing table");
    add_common(sqrt_bench, false);  // --seed doubles as the sampling seed
    int samples = 100;
    sqrt_bench->add_option("--samples", samples, "number of sampled rotations");

    auto* sched = app.add_subcommand("schedule-sim", "discrete-event schedule simulation");
    add_common(sched, false);
    int s_intervals = 8, s_workers = 2, s_iterations = 3;
    double s_ratio = 2.0, s_total = 8.0;
    std::string s_mode = "pipelined";
    sched->add_option("--intervals", s_intervals, "interval count n");
    sched->add_option("--workers", s_workers, "worker count m");
    sched->add_option("--iterations", s_iterations, "iteration count l");
    sched->add_option("--ratio", s_ratio, "cost ratio r");
    sched->add_option("--total-fine", s_total, "serial fine time T");
    sched->add_option("--mode", s_mode, "regular|pipelined")
        ->check(CLI::IsMember({"regular", "pipelined"}));

    try {
        app.parse(argc, argv);

        if (simulate->parsed()) return cmd_simulate(opts);

        if (prl->parsed()) {
            RunConfig cfg = load_run_config(opts);
            if (!mode_name.empty()) {
                cfg.mode = mode_name == "regular" ? parareal::Mode::regular : parareal::Mode::pipelined;
            }
            if (intervals > 0) cfg.intervals = intervals;
            if (ratio > 0) cfg.ratio = ratio;
            if (tolerance > 0) cfg.tolerance = tolerance;
            if (max_iters > 0) cfg.max_iterations = max_iters;
            if (fine_steps > 0) cfg.fine_steps_per_interval = fine_steps;
            if (coarse_steps > 0) cfg.coarse_steps_per_interval = coarse_steps;
            if (workers > 0) cfg.workers = workers;
            cfg.workers = resolve_workers(cfg.workers, workers_opt->count() > 0);
            return cmd_parareal(opts, cfg, with_reference, check_both);
        }

        if (gap->parsed()) {
            RunConfig cfg = load_run_config(opts);
            if (workers > 0) cfg.workers = workers;
            cfg.workers = resolve_workers(cfg.workers, gap_workers->count() > 0);
            return cmd_gap(opts, cfg, ratios, gap_live);
        }

        if (scaling->parsed()) {
            if (weak == strong) {
                std::cerr << "scaling: pass exactly one of --weak / --strong\n";
                return kExitConfig;
            }
            RunConfig cfg = load_run_config(opts);
            // Strong scaling defaults to the simulator, weak to live runs
            // (iteration growth is a live observable).
            const bool live = scaling_live || (weak && !scaling_sim);
            return cmd_scaling(opts, cfg, worker_list, weak, live);
        }

        if (sqrt_bench->parsed()) return cmd_sqrt_bench(opts, samples, opts.seed_set ? opts.seed : 1);

        if (sched->parsed()) {
            return cmd_schedule_sim(opts, s_intervals, s_workers, s_iterations, s_ratio, s_total, s_mode);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const StiffnessError& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
