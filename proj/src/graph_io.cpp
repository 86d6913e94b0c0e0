#include "rsep/graph_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace rsep {

using nlohmann::json;

std::string graph_to_json(const WeightedGraph& g, const BoundarySpec* boundary) {
    json doc;
    doc["vertices"] = g.vertex_ids();
    json edges = json::array();
    for (const auto& e : g.edges()) {
        json je;
        je["u"] = g.id_of(e.u);
        je["v"] = g.id_of(e.v);
        je["c"] = e.c;
        edges.push_back(std::move(je));
    }
    doc["edges"] = std::move(edges);
    if (boundary != nullptr && !boundary->vertices.empty()) {
        json bl = json::array();
        for (std::size_t i = 0; i < boundary->vertices.size(); ++i) {
            json jb;
            jb["v"] = boundary->vertices[i];
            jb["lambda_plus"] = boundary->lambda_plus[i];
            jb["lambda_minus"] = boundary->lambda_minus[i];
            bl.push_back(std::move(jb));
        }
        doc["boundary"] = std::move(bl);
    }
    return doc.dump();
}

GraphDocument graph_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(Errc::ParseError, std::string("graph JSON: ") + e.what());
    }
    try {
        std::vector<VertexId> vertices = doc.at("vertices").get<std::vector<VertexId>>();
        std::vector<EdgeInput> edges;
        for (const auto& je : doc.at("edges"))
            edges.push_back({je.at("u").get<VertexId>(), je.at("v").get<VertexId>(),
                             je.at("c").get<double>()});
        GraphDocument out;
        out.graph = WeightedGraph::from_parts(std::move(vertices), edges);
        if (doc.contains("boundary")) {
            BoundarySpec spec;
            for (const auto& jb : doc.at("boundary")) {
                spec.vertices.push_back(jb.at("v").get<VertexId>());
                spec.lambda_plus.push_back(jb.at("lambda_plus").get<double>());
                spec.lambda_minus.push_back(jb.at("lambda_minus").get<double>());
            }
            spec.validate(out.graph);
            out.boundary = std::move(spec);
        }
        return out;
    } catch (const json::exception& e) {
        raise(Errc::ParseError, std::string("graph JSON: ") + e.what());
    }
}

GraphDocument load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return graph_from_json(ss.str());
}

void save_graph_file(const std::string& path, const WeightedGraph& g,
                     const BoundarySpec* boundary) {
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot open " + path + " for writing");
    out << graph_to_json(g, boundary) << "\n";
}

std::string graph_content_hash(const WeightedGraph& g, const BoundarySpec* boundary) {
    std::string text = graph_to_json(g, boundary);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string("fnv1a64:") + buf;
}

} // namespace rsep
