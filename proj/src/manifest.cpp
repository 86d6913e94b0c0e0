#include "rsep/manifest.hpp"

#include "rsep/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace rsep {

std::string RunManifest::to_json() const {
    nlohmann::json doc;
    doc["tool"] = tool;
    doc["version"] = version;
    doc["command"] = command_line;
    doc["seed"] = seed;
    doc["graph_hash"] = graph_hash;
    doc["tolerances"] = tolerances;
    doc["outputs"] = outputs;
    return doc.dump();
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
};

CsvWriter::CsvWriter(std::string path) : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        raise(Errc::IoError, "cannot open " + path + " for writing");
    }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) impl_->out << ',';
        impl_->out << cells[i];
    }
    impl_->out << '\n';
}

} // namespace rsep
