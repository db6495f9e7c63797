#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "pintswim/parareal.hpp"
#include "pintswim/scenario.hpp"

namespace pintswim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration: physics scenario, parareal plan and stepper
/// resolution, output knobs. Loadable from the flat "[section] key = value"
/// format or an equivalent JSON object.
struct RunConfig {
    ScenarioConfig scenario;

    int intervals = 8;
    int workers = 2;
    double ratio = 2.0;
    int max_iterations = 10;
    double tolerance = 1e-10;
    parareal::Mode mode = parareal::Mode::pipelined;
    /// Fine solver: RK2 with this many steps per interval.
    int fine_steps_per_interval = 100;
    /// Coarse solver: Euler. 0 derives the step count from the wall-cost
    /// ratio r (RK2 costs two rhs evaluations per step, Euler one):
    /// coarse_steps = max(1, 2 * fine_steps / r).
    int coarse_steps_per_interval = 0;

    int snapshot_stride = 1;

    /// Flat canonical view ("section.key" -> value) of everything above;
    /// the source of the config hash and the snapshot embedded in records.
    std::map<std::string, std::string> flat() const;
    /// FNV-1a 64 over the canonical view, hex.
    std::string hash() const;

    int resolved_coarse_steps() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace pintswim
