#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <array>
#include <algorithm>

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string output;
};

struct CliFixture {
    fs::path dir;
    CliFixture() {
        dir = fs::temp_directory_path() / ("pintswim_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~CliFixture() { fs::remove_all(dir); }

    std::string file(const std::string& name) const { return (dir / name).string(); }

    CliResult run(const std::string& args) const {
        const std::string log = file("last_output.txt");
        const std::string cmd = std::string(SWIM_CLI_PATH) + " " + args + " > " + log + " 2>&1";
        const int status = std::system(cmd.c_str());
        CliResult r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        std::ifstream in(log);
        std::ostringstream buf;
        buf << in.rdbuf();
        r.output = buf.str();
        return r;
    }

    std::string write_config(const std::string& name, const std::string& body) const {
        const std::string path = file(name);
        std::ofstream out(path);
        out << body;
        return path;
    }
};

const char* kQuickConfig = R"([scenario]
rod_count = 1
nodes_per_rod = 11
seed = 9
fine_dt = 0.00025
horizon = 0.002
amplitude = 0.05

[parareal]
intervals = 4
workers = 2
ratio = 4
max_iterations = 8
tolerance = 1e-9
fine_steps_per_interval = 16

[output]
snapshot_stride = 1
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("config errors exit with code 3") {
    CliFixture cli;
    const auto bad = cli.write_config("bad.cfg", "[scenario]\nrod_count = banana\n");
    const auto r = cli.run("simulate --config " + bad + " --output-dir " + cli.file("out"));
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("rod_count") != std::string::npos);

    const auto missing = cli.run("simulate --config " + cli.file("nope.cfg"));
    CHECK(missing.exit_code == 3);
}

TEST_CASE("simulate is reproducible and quiet without actuation") {
    CliFixture cli;
    const auto cfg = cli.write_config("quick.cfg", kQuickConfig);

    const auto r1 = cli.run("simulate --config " + cfg + " --output-dir " + cli.file("a"));
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.output.find("9 frames over 8 steps") != std::string::npos);
    const auto r2 = cli.run("simulate --config " + cfg + " --output-dir " + cli.file("b"));
    REQUIRE(r2.exit_code == 0);

    // Identical bytes for identical (config, seed).
    std::string traj_a, traj_b;
    for (const auto& e : fs::directory_iterator(cli.file("a"))) {
        if (e.path().extension() == ".bin") traj_a = e.path().string();
    }
    for (const auto& e : fs::directory_iterator(cli.file("b"))) {
        if (e.path().extension() == ".bin") traj_b = e.path().string();
    }
    REQUIRE(!traj_a.empty());
    CHECK(slurp(traj_a) == slurp(traj_b));

    SUBCASE("zero waveform leaves the rod in place") {
        std::string quiet(kQuickConfig);
        const auto pos = quiet.find("amplitude = 0.05");
        quiet.replace(pos, 16, "amplitude = 0.0 ");
        const auto qcfg = cli.write_config("quiet.cfg", quiet);
        const auto r = cli.run("simulate --config " + qcfg + " --output-dir " + cli.file("q"));
        REQUIRE(r.exit_code == 0);
        // First and last frame positions agree to near machine precision.
        std::string csv;
        for (const auto& e : fs::directory_iterator(cli.file("q"))) {
            if (e.path().extension() == ".csv") csv = e.path().string();
        }
        REQUIRE(!csv.empty());
        std::ifstream in(csv);
        std::string line;
        std::getline(in, line);  // header
        std::vector<std::array<double, 3>> first, last;
        while (std::getline(in, line)) {
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double frame, t, rod, node, x, y, z;
            row >> frame >> t >> rod >> node >> x >> y >> z;
            if (frame == 0) first.push_back({x, y, z});
            if (frame == 8) last.push_back({x, y, z});
        }
        REQUIRE(first.size() == 11);
        REQUIRE(last.size() == 11);
        for (std::size_t i = 0; i < first.size(); ++i) {
            for (int c = 0; c < 3; ++c) CHECK(std::abs(first[i][c] - last[i][c]) < 1e-12);
        }
    }
}

TEST_CASE("parareal exit codes distinguish non-convergence") {
    CliFixture cli;
    const auto cfg = cli.write_config("quick.cfg", kQuickConfig);

    const auto ok = cli.run("parareal --config " + cfg + " --output-dir " + cli.file("ok"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("converged") != std::string::npos);

    const auto capped = cli.run("parareal --config " + cfg + " --max-iterations 1 --tol 1e-14 --output-dir " +
                                cli.file("capped"));
    CHECK(capped.exit_code == 2);
    // The record is still written on non-convergence.
    bool record_found = false;
    for (const auto& e : fs::directory_iterator(cli.file("capped"))) {
        if (e.path().filename().string().rfind("record_parareal", 0) == 0) record_found = true;
    }
    CHECK(record_found);
}

TEST_CASE("parareal --check-both confirms mode equivalence") {
    CliFixture cli;
    const auto cfg = cli.write_config("quick.cfg", kQuickConfig);
    const auto r = cli.run("parareal --config " + cfg + " --check-both --output-dir " + cli.file("out"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("identical iterates and states") != std::string::npos);
}

TEST_CASE("stiffness abort exits with code 4") {
    CliFixture cli;
    std::string stiff(kQuickConfig);
    const auto pos = stiff.find("fine_dt = 0.00025");
    stiff.replace(pos, 17, "fine_dt = 0.5    ");
    const auto pos2 = stiff.find("horizon = 0.002");
    stiff.replace(pos2, 15, "horizon = 4.0  ");
    const auto cfg = cli.write_config("stiff.cfg", stiff);
    const auto r = cli.run("simulate --config " + cfg + " --output-dir " + cli.file("out"));
    CHECK(r.exit_code == 4);
    CHECK(r.output.find("numerical abort") != std::string::npos);
}

TEST_CASE("gap requires at least three ratios") {
    CliFixture cli;
    const auto cfg = cli.write_config("quick.cfg", kQuickConfig);
    const auto r = cli.run("gap --config " + cfg + " --ratios 4 --output-dir " + cli.file("out"));
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("3 ratios") != std::string::npos);

    const auto ok =
        cli.run("gap --config " + cfg + " --ratios 2,5,8 --workers 2 --output-dir " + cli.file("out"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("R^2") != std::string::npos);
}

TEST_CASE("sqrt-bench emits one row per sample") {
    CliFixture cli;
    const auto r = cli.run("sqrt-bench --samples 25 --seed 5 --output-dir " + cli.file("out"));
    REQUIRE(r.exit_code == 0);
    std::ifstream in(cli.file("out/sqrt_bench_seed5.csv"));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 26);  // header + samples

    const auto tiny = cli.run("sqrt-bench --samples 5");
    CHECK(tiny.exit_code == 3);
}

TEST_CASE("PINT_SWIMMER_THREADS caps the pool unless --workers is explicit") {
    CliFixture cli;
    const auto cfg = cli.write_config("quick.cfg", kQuickConfig);

    auto max_worker_lane = [&](const std::string& subdir) {
        int max_lane = -1;
        for (const auto& e : fs::directory_iterator(cli.file(subdir))) {
            if (e.path().filename().string().rfind("schedule_", 0) != 0) continue;
            std::ifstream in(e.path());
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                max_lane = std::max(max_lane, std::stoi(line.substr(0, line.find(','))));
            }
        }
        return max_lane;
    };

    setenv("PINT_SWIMMER_THREADS", "1", 1);
    const auto env_run = cli.run("parareal --config " + cfg + " --output-dir " + cli.file("c1"));
    CHECK(env_run.exit_code == 0);
    CHECK(max_worker_lane("c1") == 0);  // config asked for 2, env capped to 1

    const auto flag_run =
        cli.run("parareal --config " + cfg + " --workers 2 --output-dir " + cli.file("c2"));
    unsetenv("PINT_SWIMMER_THREADS");
    CHECK(flag_run.exit_code == 0);
    CHECK(max_worker_lane("c2") == 1);  // explicit flag overrides the cap
}
