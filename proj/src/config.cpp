#include "pintswim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pintswim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Key-value view with typed getters and unknown-key detection.
class KvReader {
  public:
    explicit KvReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    double number(const std::string& key, double fallback) {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        seen_.insert(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("config: key '" + key + "' has non-numeric value '" + it->second + "'");
        }
    }

    std::string word(const std::string& key, const std::string& fallback) {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        seen_.insert(key);
        return it->second;
    }

    void check_all_consumed() const {
        for (const auto& [k, v] : kv_) {
            if (!seen_.count(k)) throw ConfigError("config: unknown key '" + k + "'");
        }
    }

  private:
    std::map<std::string, std::string> kv_;
    std::set<std::string> seen_;
};

RunConfig from_flat(const std::map<std::string, std::string>& flat) {
    KvReader kv{flat};
    RunConfig c;
    auto& s = c.scenario;
    s.rod_count = static_cast<std::size_t>(kv.number("scenario.rod_count", 1));
    s.nodes_per_rod = static_cast<std::size_t>(kv.number("scenario.nodes_per_rod", 51));
    s.rod_length = kv.number("scenario.rod_length", 1.0);
    s.material.a1 = kv.number("scenario.a1", s.material.a1);
    s.material.a2 = kv.number("scenario.a2", s.material.a2);
    s.material.a3 = kv.number("scenario.a3", s.material.a3);
    s.material.b1 = kv.number("scenario.b1", s.material.b1);
    s.material.b2 = kv.number("scenario.b2", s.material.b2);
    s.material.b3 = kv.number("scenario.b3", s.material.b3);
    s.waveform.amplitude = kv.number("scenario.amplitude", s.waveform.amplitude);
    s.waveform.frequency = kv.number("scenario.wave_frequency", s.waveform.frequency);
    s.waveform.wavelength = kv.number("scenario.wavelength", s.waveform.wavelength);
    s.epsilon = kv.number("scenario.epsilon", 0.0);
    s.mu = kv.number("scenario.mu", 1.0);
    s.lj_well_depth = kv.number("scenario.lj_well_depth", 0.0);
    s.lj_sigma = kv.number("scenario.lj_sigma", 0.0);
    s.wall_clearance = kv.number("scenario.wall_clearance", 1.0);
    s.seed = static_cast<std::uint64_t>(kv.number("scenario.seed", 1));
    s.fine_dt = kv.number("scenario.fine_dt", 1e-6);
    s.horizon = kv.number("scenario.horizon", 1e-3);
    const std::string placement = kv.word("scenario.placement", "grid");
    if (placement == "grid") {
        s.placement = Placement::grid;
    } else if (placement == "random") {
        s.placement = Placement::random;
    } else {
        throw ConfigError("config: scenario.placement must be 'grid' or 'random', got '" + placement + "'");
    }
    const std::string wall = kv.word("scenario.wall_mode", "free_space");
    if (wall == "free_space") {
        s.wall_mode = WallMode::free_space;
    } else if (wall == "image_wall") {
        s.wall_mode = WallMode::image_wall;
    } else {
        throw ConfigError("config: scenario.wall_mode must be 'free_space' or 'image_wall'");
    }

    c.intervals = static_cast<int>(kv.number("parareal.intervals", 8));
    c.workers = static_cast<int>(kv.number("parareal.workers", 2));
    c.ratio = kv.number("parareal.ratio", 2.0);
    c.max_iterations = static_cast<int>(kv.number("parareal.max_iterations", 10));
    c.tolerance = kv.number("parareal.tolerance", 1e-10);
    c.fine_steps_per_interval = static_cast<int>(kv.number("parareal.fine_steps_per_interval", 100));
    c.coarse_steps_per_interval = static_cast<int>(kv.number("parareal.coarse_steps_per_interval", 0));
    const std::string mode = kv.word("parareal.mode", "pipelined");
    if (mode == "regular") {
        c.mode = parareal::Mode::regular;
    } else if (mode == "pipelined") {
        c.mode = parareal::Mode::pipelined;
    } else {
        throw ConfigError("config: parareal.mode must be 'regular' or 'pipelined', got '" + mode + "'");
    }

    c.snapshot_stride = static_cast<int>(kv.number("output.snapshot_stride", 1));
    kv.check_all_consumed();

    if (c.fine_steps_per_interval < 1) throw ConfigError("config: fine_steps_per_interval must be >= 1");
    if (c.snapshot_stride < 1) throw ConfigError("config: snapshot_stride must be >= 1");
    return c;
}

std::map<std::string, std::string> flatten_json(const nlohmann::json& j) {
    std::map<std::string, std::string> flat;
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object()) throw ConfigError("config: JSON top level must contain section objects");
        for (const auto& [key, value] : body.items()) {
            const std::string path = section + "." + key;
            if (value.is_string()) {
                flat[path] = value.get<std::string>();
            } else if (value.is_number() || value.is_boolean()) {
                flat[path] = value.dump();
            } else {
                throw ConfigError("config: unsupported JSON value for '" + path + "'");
            }
        }
    }
    return flat;
}

std::map<std::string, std::string> parse_flat_text(const std::string& text) {
    std::map<std::string, std::string> flat;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config: line " + std::to_string(lineno) + ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("config: line " + std::to_string(lineno) + ": empty section name");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config: line " + std::to_string(lineno) + ": empty key or value");
        }
        if (section.empty()) {
            throw ConfigError("config: line " + std::to_string(lineno) + ": key outside any [section]");
        }
        flat[section + "." + key] = value;
    }
    return flat;
}

}  // namespace

std::map<std::string, std::string> RunConfig::flat() const {
    std::map<std::string, std::string> f;
    const auto& s = scenario;
    f["scenario.rod_count"] = std::to_string(s.rod_count);
    f["scenario.nodes_per_rod"] = std::to_string(s.nodes_per_rod);
    f["scenario.rod_length"] = fmt_double(s.rod_length);
    f["scenario.a1"] = fmt_double(s.material.a1);
    f["scenario.a2"] = fmt_double(s.material.a2);
    f["scenario.a3"] = fmt_double(s.material.a3);
    f["scenario.b1"] = fmt_double(s.material.b1);
    f["scenario.b2"] = fmt_double(s.material.b2);
    f["scenario.b3"] = fmt_double(s.material.b3);
    f["scenario.amplitude"] = fmt_double(s.waveform.amplitude);
    f["scenario.wave_frequency"] = fmt_double(s.waveform.frequency);
    f["scenario.wavelength"] = fmt_double(s.waveform.wavelength);
    f["scenario.epsilon"] = fmt_double(s.epsilon);
    f["scenario.mu"] = fmt_double(s.mu);
    f["scenario.lj_well_depth"] = fmt_double(s.lj_well_depth);
    f["scenario.lj_sigma"] = fmt_double(s.lj_sigma);
    f["scenario.wall_clearance"] = fmt_double(s.wall_clearance);
    f["scenario.seed"] = std::to_string(s.seed);
    f["scenario.fine_dt"] = fmt_double(s.fine_dt);
    f["scenario.horizon"] = fmt_double(s.horizon);
    f["scenario.placement"] = s.placement == Placement::grid ? "grid" : "random";
    f["scenario.wall_mode"] = s.wall_mode == WallMode::free_space ? "free_space" : "image_wall";
    f["parareal.intervals"] = std::to_string(intervals);
    f["parareal.workers"] = std::to_string(workers);
    f["parareal.ratio"] = fmt_double(ratio);
    f["parareal.max_iterations"] = std::to_string(max_iterations);
    f["parareal.tolerance"] = fmt_double(tolerance);
    f["parareal.mode"] = mode == parareal::Mode::regular ? "regular" : "pipelined";
    f["parareal.fine_steps_per_interval"] = std::to_string(fine_steps_per_interval);
    f["parareal.coarse_steps_per_interval"] = std::to_string(coarse_steps_per_interval);
    f["output.snapshot_stride"] = std::to_string(snapshot_stride);
    return f;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : flat()) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int RunConfig::resolved_coarse_steps() const {
    if (coarse_steps_per_interval > 0) return coarse_steps_per_interval;
    return std::max(1, static_cast<int>(std::llround(2.0 * fine_steps_per_interval / ratio)));
}

RunConfig parse_config_text(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& err) {
            throw ConfigError(std::string("config: JSON parse error: ") + err.what());
        }
        return from_flat(flatten_json(j));
    }
    return from_flat(parse_flat_text(text));
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace pintswim
