#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rsep {

/// Provenance block embedded in every machine output. Deliberately free of
/// wall-clock data so identical inputs reproduce byte-identical files; the
/// human summary on stdout carries the timestamp instead.
struct RunManifest {
    std::string tool = "resistor-sep";
    std::string version;
    std::string command_line;
    std::uint64_t seed = 0;
    std::string graph_hash;
    std::map<std::string, double> tolerances;
    std::vector<std::string> outputs;

    std::string to_json() const;
};

/// Formats a double with 17 significant digits (lossless round trip).
std::string format_double(double v);

/// Minimal CSV writer: "." decimal point, no locale surprises.
class CsvWriter {
public:
    explicit CsvWriter(std::string path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& cells);

private:
    struct Impl;
    Impl* impl_;
};

} // namespace rsep
