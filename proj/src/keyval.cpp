#include "rsep/keyval.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rsep {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(Errc::ValidationError, "field '" + field + "': not a number: '" + value + "'");
    }
}

long parse_integer(const std::string& field, const std::string& value) {
    try {
        std::size_t used = 0;
        long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        raise(Errc::ValidationError, "field '" + field + "': not an integer: '" + value + "'");
    }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& field, const std::string& value, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse(field, item));
    }
    if (out.empty()) raise(Errc::ValidationError, "field '" + field + "': empty list");
    return out;
}

} // namespace

std::map<std::string, std::string> parse_keyval(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            raise(Errc::ParseError, "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            raise(Errc::ParseError, "line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second)
            raise(Errc::ParseError,
                  "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    return kv;
}

std::map<std::string, std::string> load_keyval_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_keyval(ss.str());
}

ExperimentFile experiment_from_keyval(const std::map<std::string, std::string>& kv) {
    ExperimentFile out;
    ExperimentConfig& cfg = out.config;

    for (const auto& [key, value] : kv) {
        if (key == "graph") {
            out.graph = value;
        } else if (key == "origin") {
            out.origin = value;
            parse_integer(key, value);
        } else if (key == "radii") {
            cfg.radii.clear();
            for (long r : parse_list<long>(key, value, parse_integer))
                cfg.radii.push_back(static_cast<int>(r));
        } else if (key == "levels") {
            cfg.levels.clear();
            for (long r : parse_list<long>(key, value, parse_integer))
                cfg.levels.push_back(static_cast<int>(r));
        } else if (key == "epsilon") {
            cfg.epsilons = parse_list<double>(key, value, parse_number);
            for (double e : cfg.epsilons)
                if (!(e > 0.0) || e > 1.0)
                    raise(Errc::ValidationError, "field 'epsilon': must lie in (0,1]");
        } else if (key == "block_radius" || key == "j") {
            cfg.block_radius = static_cast<int>(parse_integer(key, value));
        } else if (key == "bundle") {
            cfg.bundle = value;
        } else if (key == "delta") {
            cfg.delta = parse_number(key, value);
        } else if (key == "horizon") {
            cfg.horizon = parse_number(key, value);
        } else if (key == "alpha") {
            cfg.alpha = parse_number(key, value);
            if (cfg.alpha < 0.0 || cfg.alpha > 1.0)
                raise(Errc::ValidationError, "field 'alpha': must lie in [0,1]");
        } else if (key == "boundary_driven") {
            cfg.boundary_driven = value == "true" || value == "1" || value == "yes";
        } else if (key == "initial") {
            cfg.initial = value;
        } else if (key == "trajectories") {
            cfg.trajectories = static_cast<int>(parse_integer(key, value));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
        } else if (key == "g_poly") {
            cfg.g_poly = parse_list<double>(key, value, parse_number);
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_integer(key, value));
        } else if (key == "probes") {
            if (value == "all")
                cfg.probe_all = true;
            else if (value == "default")
                cfg.probe_all = false;
            else
                raise(Errc::ValidationError, "field 'probes': default or all");
        } else if (key == "confidence") {
            cfg.confidence = parse_number(key, value);
        } else if (key == "volume_mode") {
            if (value == "measure")
                cfg.volume_mode = VolumeMode::Measure;
            else if (value == "count")
                cfg.volume_mode = VolumeMode::Count;
            else
                raise(Errc::ValidationError, "field 'volume_mode': measure or count");
        } else if (key == "exit_mode") {
            if (value == "max")
                cfg.exit_mode = ExitMode::MaxOverBall;
            else if (value == "origin")
                cfg.exit_mode = ExitMode::OriginOnly;
            else
                raise(Errc::ValidationError, "field 'exit_mode': max or origin");
        } else {
            raise(Errc::ValidationError, "unknown field '" + key + "'");
        }
    }
    if (out.graph.empty()) raise(Errc::ValidationError, "field 'graph' is required");
    cfg.validate();
    return out;
}

} // namespace rsep
