#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

#include "pintswim/config.hpp"
#include "pintswim/parareal.hpp"
#include "pintswim/propagators.hpp"

namespace pintswim {

/// Flat layout used for parareal states and trajectory frames: per node, 12
/// doubles [x, d1, d2, d3]. Rods concatenated in order.
parareal::Vec pack_state(const SystemState& state);
SystemState unpack_state(const parareal::Vec& v, std::size_t rod_count, std::size_t nodes_per_rod);

/// Convergence metric over node POSITIONS only (the triad entries are carried
/// in the state but are not grid points).
parareal::MetricFn rod_position_metric();

/// Binary trajectory: consecutive frames of [t, packed state], doubles in
/// native byte order, with a JSON sidecar (<path>.json) describing the layout.
class TrajectoryWriter {
  public:
    TrajectoryWriter(const std::string& path, const RunConfig& config);
    void append(double t, const SystemState& state);
    /// Writes the sidecar; called by the destructor if needed.
    void close();
    ~TrajectoryWriter();

    std::size_t frame_count() const { return frames_; }

  private:
    std::string path_;
    RunConfig config_;
    std::ofstream out_;
    std::size_t frames_ = 0;
    bool closed_ = false;
};

struct TrajectoryFrame {
    double t = 0.0;
    SystemState state;
};

std::vector<TrajectoryFrame> read_trajectory(const std::string& path);

/// Writes positions as CSV (frame, t, rod, node, x, y, z); small runs only.
void export_trajectory_csv(const std::string& binary_path, const std::string& csv_path);

/// Everything one run emits, serialized as JSON next to the data files.
struct RunRecord {
    RunConfig config;
    std::string command;
    std::vector<double> eta_tilde;
    std::vector<double> eta;
    int iterations_used = 0;
    bool converged = true;
    double wall_seconds = 0.0;
    double schedule_idle = 0.0;  // W from the trace, when a trace exists
    TimingBreakdown timings;
    std::vector<std::string> artifacts;

    void save(const std::string& path) const;
};

/// "seed<seed>_<hash8>" tag embedded in every emitted file name.
std::string run_tag(const RunConfig& config);

void write_schedule_csv(const std::string& path, const ScheduleTrace& trace);

}  // namespace pintswim
