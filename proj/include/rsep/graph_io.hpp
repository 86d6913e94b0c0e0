#pragma once

#include "rsep/boundary.hpp"
#include "rsep/graph.hpp"

#include <optional>
#include <string>

namespace rsep {

struct GraphDocument {
    WeightedGraph graph;
    std::optional<BoundarySpec> boundary;
};

/// Canonical JSON document:
///   {"vertices":[ids],"edges":[{"c":..,"u":..,"v":..}],
///    "boundary":[{"lambda_minus":..,"lambda_plus":..,"v":..}]}
/// The boundary section is optional. Serialization sorts keys and vertex
/// ids, so equal graphs produce byte-identical documents.
std::string graph_to_json(const WeightedGraph& g, const BoundarySpec* boundary = nullptr);
GraphDocument graph_from_json(const std::string& text);

GraphDocument load_graph_file(const std::string& path);
void save_graph_file(const std::string& path, const WeightedGraph& g,
                     const BoundarySpec* boundary = nullptr);

/// FNV-1a over the canonical JSON; stable content identity for manifests.
std::string graph_content_hash(const WeightedGraph& g, const BoundarySpec* boundary = nullptr);

} // namespace rsep
