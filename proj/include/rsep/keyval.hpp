#pragma once

#include "rsep/experiment.hpp"

#include <map>
#include <string>

namespace rsep {

/// Plain `key = value` file: one pair per line, `#` comments, blank lines
/// allowed. Duplicate keys are a ParseError (with line number).
std::map<std::string, std::string> parse_keyval(const std::string& text);
std::map<std::string, std::string> load_keyval_file(const std::string& path);

struct ExperimentFile {
    std::string graph;   // path to a graph JSON document
    std::string origin;  // optional vertex id; empty = family default / smallest id
    ExperimentConfig config;
};

/// Builds a validated experiment description, applying the documented
/// defaults (alpha = 0.5, delta = 0.1, trajectories = 1000). Unknown keys
/// and out-of-range values are ValidationError naming the field.
ExperimentFile experiment_from_keyval(const std::map<std::string, std::string>& kv);

} // namespace rsep
