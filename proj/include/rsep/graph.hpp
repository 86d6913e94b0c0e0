#pragma once

#include "rsep/errors.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace rsep {

using VertexId = std::int64_t;

struct EdgeInput {
    VertexId u;
    VertexId v;
    double conductance;
};

/// Finite connected weighted graph. Immutable after construction; safe to
/// share across threads. Vertex ids are opaque integers, stored in sorted
/// order; `index_of` maps an id to its dense position.
class WeightedGraph {
public:
    struct Edge {
        int u; // dense indices, u < v
        int v;
        double c;
    };

    WeightedGraph() = default;

    static WeightedGraph from_edges(std::span<const EdgeInput> edges);
    static WeightedGraph from_edges(const std::vector<EdgeInput>& edges) {
        return from_edges(std::span<const EdgeInput>(edges));
    }
    /// Explicit vertex set; required for edge-free graphs (single vertex).
    static WeightedGraph from_parts(std::vector<VertexId> vertices,
                                    std::span<const EdgeInput> edges);

    int num_vertices() const { return static_cast<int>(ids_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    const std::vector<VertexId>& vertex_ids() const { return ids_; }
    VertexId id_of(int index) const { return ids_[static_cast<std::size_t>(index)]; }
    int index_of(VertexId id) const;
    bool contains(VertexId id) const { return index_.count(id) > 0; }

    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::pair<int, double>>& neighbors(int index) const {
        return adj_[static_cast<std::size_t>(index)];
    }

    /// Vertex weight c_x, the sum of incident conductances.
    double weight(int index) const { return weight_[static_cast<std::size_t>(index)]; }
    const std::vector<double>& weights() const { return weight_; }

    /// 𝒱(A) = Σ_{x∈A} c_x for a set of dense indices.
    double volume(std::span<const int> indices) const;
    /// 𝒱(V), equal to twice the total edge conductance.
    double total_volume() const { return total_volume_; }

    /// BFS hop distances from `source` (dense index) to every vertex.
    std::vector<int> distances_from(int source) const;

    /// Open metric ball {y : d(x,y) < r}, sorted dense indices.
    /// r = 0 gives the empty set, r = 1 gives {x}.
    std::vector<int> ball(VertexId center, int radius) const;

    /// Induced subgraph on the given dense indices; vertex ids and edge
    /// conductances are inherited. Throws DisconnectedGraph if the induced
    /// graph is not connected.
    WeightedGraph induced_subgraph(std::span<const int> indices) const;

    int graph_diameter() const;

private:
    std::vector<VertexId> ids_;
    std::unordered_map<VertexId, int> index_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, double>>> adj_;
    std::vector<double> weight_;
    double total_volume_ = 0.0;

    void finalize_and_check();
};

struct GraphExhaustion {
    VertexId origin = 0;
    std::vector<int> radii;                   // strictly increasing, radii[0] == 1
    std::vector<std::vector<int>> ball_sets;  // dense indices into the mother graph
    std::vector<WeightedGraph> levels;        // induced subgraphs Γ_N
    std::vector<double> mass_scale;           // 𝒱_N, filled by scaling machinery
    std::vector<double> time_scale;           // 𝒯_N, filled by scaling machinery

    int num_levels() const { return static_cast<int>(radii.size()); }
};

/// Nested induced ball subgraphs around `origin`. Scale tables are left
/// empty; `scaling_report` fills them.
GraphExhaustion exhaust(const WeightedGraph& g, VertexId origin, std::span<const int> radii);

// --- example families (all unit conductances) ---------------------------

struct GeneratedGraph {
    WeightedGraph graph;
    /// Analytic boundary for sg (the three level-0 corners); empty otherwise.
    std::vector<VertexId> analytic_boundary;
    VertexId default_origin = 0;
};

GeneratedGraph make_path(int n);
GeneratedGraph make_lattice_box(int dim, int side);
GeneratedGraph make_sierpinski_gasket(int level);
GeneratedGraph make_vicsek_tree(int level);
GeneratedGraph make_pre_carpet(int level);

/// Dispatch by family name: path | lattice_box | sg | vicsek | carpet.
GeneratedGraph generate_family(const std::string& family, int level_or_n, int dim = 2);

} // namespace rsep
