#include "pintswim/io.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace pintswim {

parareal::Vec pack_state(const SystemState& state) {
    parareal::Vec v;
    std::size_t total = 0;
    for (const auto& rod : state) total += rod.node_count();
    v.reserve(12 * total);
    for (const auto& rod : state) {
        for (std::size_t k = 0; k < rod.node_count(); ++k) {
            for (const Vec3* field : {&rod.x[k], &rod.d1[k], &rod.d2[k], &rod.d3[k]}) {
                v.push_back(field->x);
                v.push_back(field->y);
                v.push_back(field->z);
            }
        }
    }
    return v;
}

SystemState unpack_state(const parareal::Vec& v, std::size_t rod_count, std::size_t nodes_per_rod) {
    if (v.size() != 12 * rod_count * nodes_per_rod) {
        throw std::invalid_argument("unpack_state: vector size does not match rod layout");
    }
    SystemState state(rod_count);
    std::size_t i = 0;
    for (auto& rod : state) {
        rod.x.resize(nodes_per_rod);
        rod.d1.resize(nodes_per_rod);
        rod.d2.resize(nodes_per_rod);
        rod.d3.resize(nodes_per_rod);
        for (std::size_t k = 0; k < nodes_per_rod; ++k) {
            for (Vec3* field : {&rod.x[k], &rod.d1[k], &rod.d2[k], &rod.d3[k]}) {
                field->x = v[i++];
                field->y = v[i++];
                field->z = v[i++];
            }
        }
    }
    return state;
}

parareal::MetricFn rod_position_metric() {
    return [](const parareal::Vec& x, const parareal::Vec& y) {
        if (x.size() != y.size() || x.size() % 12 != 0) {
            throw std::invalid_argument("rod_position_metric: inconsistent packed states");
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); i += 12) {
            double num = 0.0, den = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double d = x[i + c] - y[i + c];
                num += d * d;
                den += x[i + c] * x[i + c];
            }
            num = std::sqrt(num);
            den = std::sqrt(den);
            worst = std::max(worst, den < 1e-14 ? num : num / den);
        }
        return worst;
    };
}

TrajectoryWriter::TrajectoryWriter(const std::string& path, const RunConfig& config)
    : path_(path), config_(config), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("trajectory: cannot open '" + path + "' for writing");
}

void TrajectoryWriter::append(double t, const SystemState& state) {
    const auto packed = pack_state(state);
    out_.write(reinterpret_cast<const char*>(&t), sizeof(double));
    out_.write(reinterpret_cast<const char*>(packed.data()),
               static_cast<std::streamsize>(packed.size() * sizeof(double)));
    ++frames_;
}

void TrajectoryWriter::close() {
    if (closed_) return;
    closed_ = true;
    out_.close();
    nlohmann::json side;
    side["rod_count"] = config_.scenario.rod_count;
    side["nodes_per_rod"] = config_.scenario.nodes_per_rod;
    side["fine_dt"] = config_.scenario.fine_dt;
    side["snapshot_stride"] = config_.snapshot_stride;
    side["frame_count"] = frames_;
    side["seed"] = config_.scenario.seed;
    side["config_hash"] = config_.hash();
    side["layout"] = "frame = [t, per node: x(3), d1(3), d2(3), d3(3)], float64 native order";
    std::ofstream js(path_ + ".json");
    if (!js) throw std::runtime_error("trajectory: cannot write sidecar for '" + path_ + "'");
    js << side.dump(2) << "\n";
}

TrajectoryWriter::~TrajectoryWriter() {
    try {
        close();
    } catch (...) {
    }
}

std::vector<TrajectoryFrame> read_trajectory(const std::string& path) {
    std::ifstream side_in(path + ".json");
    if (!side_in) throw std::runtime_error("trajectory: missing sidecar '" + path + ".json'");
    const auto side = nlohmann::json::parse(side_in);
    const auto rods = side.at("rod_count").get<std::size_t>();
    const auto nodes = side.at("nodes_per_rod").get<std::size_t>();
    const auto frames = side.at("frame_count").get<std::size_t>();

    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("trajectory: cannot open '" + path + "'");
    std::vector<TrajectoryFrame> out;
    out.reserve(frames);
    const std::size_t doubles_per_frame = 12 * rods * nodes;
    for (std::size_t f = 0; f < frames; ++f) {
        TrajectoryFrame frame;
        parareal::Vec packed(doubles_per_frame);
        in.read(reinterpret_cast<char*>(&frame.t), sizeof(double));
        in.read(reinterpret_cast<char*>(packed.data()),
                static_cast<std::streamsize>(packed.size() * sizeof(double)));
        if (!in) throw std::runtime_error("trajectory: truncated file '" + path + "'");
        frame.state = unpack_state(packed, rods, nodes);
        out.push_back(std::move(frame));
    }
    return out;
}

void export_trajectory_csv(const std::string& binary_path, const std::string& csv_path) {
    const auto frames = read_trajectory(binary_path);
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("trajectory: cannot open '" + csv_path + "' for writing");
    out << "frame,t,rod,node,x,y,z\n";
    out.precision(17);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        for (std::size_t r = 0; r < frames[f].state.size(); ++r) {
            const auto& rod = frames[f].state[r];
            for (std::size_t k = 0; k < rod.node_count(); ++k) {
                out << f << ',' << frames[f].t << ',' << r << ',' << k << ',' << rod.x[k].x << ','
                    << rod.x[k].y << ',' << rod.x[k].z << '\n';
            }
        }
    }
}

void RunRecord::save(const std::string& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = config.flat();
    j["config_hash"] = config.hash();
    j["seed"] = config.scenario.seed;
    j["convergence"]["eta_tilde"] = eta_tilde;
    j["convergence"]["eta"] = eta;
    j["convergence"]["iterations_used"] = iterations_used;
    j["convergence"]["converged"] = converged;
    j["schedule"]["wall_seconds"] = wall_seconds;
    j["schedule"]["total_idle"] = schedule_idle;
    j["timings"]["initialization"] = timings.initialization;
    j["timings"]["velocity_computation"] = timings.velocity;
    j["timings"]["triad_update"] = timings.triad_update;
    j["artifacts"] = artifacts;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("run record: cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
}

std::string run_tag(const RunConfig& config) {
    return "seed" + std::to_string(config.scenario.seed) + "_" + config.hash().substr(0, 8);
}

void write_schedule_csv(const std::string& path, const ScheduleTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("schedule: cannot open '" + path + "' for writing");
    out << "worker,kind,t_start,t_end\n";
    out.precision(17);
    for (const auto& e : trace.events) {
        out << e.worker << ',' << task_kind_name(e.kind) << ',' << e.t_start << ',' << e.t_end << '\n';
    }
}

}  // namespace pintswim
