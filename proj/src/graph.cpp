#include "rsep/graph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace rsep {

namespace {

// Vertex budget guarding the generators; a few million vertices is the
// point where sparse solves stop being interactive on one machine.
constexpr std::int64_t kVertexBudget = 4'000'000;

void check_budget(std::int64_t predicted, const std::string& what) {
    if (predicted > kVertexBudget)
        raise(Errc::BudgetExceeded,
              what + " would create " + std::to_string(predicted) + " vertices (budget " +
                  std::to_string(kVertexBudget) + ")");
}

} // namespace

WeightedGraph WeightedGraph::from_edges(std::span<const EdgeInput> edges) {
    std::vector<VertexId> vertices;
    vertices.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        vertices.push_back(e.u);
        vertices.push_back(e.v);
    }
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    if (vertices.empty()) raise(Errc::EmptySet, "graph needs at least one vertex");
    return from_parts(std::move(vertices), edges);
}

WeightedGraph WeightedGraph::from_parts(std::vector<VertexId> vertices,
                                        std::span<const EdgeInput> edges) {
    WeightedGraph g;
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    if (vertices.empty()) raise(Errc::EmptySet, "graph needs at least one vertex");
    g.ids_ = std::move(vertices);
    g.index_.reserve(g.ids_.size() * 2);
    for (int i = 0; i < static_cast<int>(g.ids_.size()); ++i)
        g.index_.emplace(g.ids_[static_cast<std::size_t>(i)], i);

    std::set<std::pair<int, int>> seen;
    g.edges_.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.u == e.v)
            raise(Errc::SelfLoop, "self-loop at vertex " + std::to_string(e.u));
        if (!(e.conductance > 0.0))
            raise(Errc::NonpositiveConductance,
                  "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") has c = " +
                      std::to_string(e.conductance));
        auto iu = g.index_.find(e.u);
        auto iv = g.index_.find(e.v);
        if (iu == g.index_.end() || iv == g.index_.end())
            raise(Errc::UnknownVertex, "edge endpoint not in vertex list");
        int a = std::min(iu->second, iv->second);
        int b = std::max(iu->second, iv->second);
        if (!seen.emplace(a, b).second)
            raise(Errc::DuplicateEdge,
                  "duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
        g.edges_.push_back({a, b, e.conductance});
    }
    g.finalize_and_check();
    return g;
}

void WeightedGraph::finalize_and_check() {
    const int n = num_vertices();
    adj_.assign(static_cast<std::size_t>(n), {});
    weight_.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& e : edges_) {
        adj_[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.c);
        adj_[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.c);
        weight_[static_cast<std::size_t>(e.u)] += e.c;
        weight_[static_cast<std::size_t>(e.v)] += e.c;
    }
    for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
    total_volume_ = std::accumulate(weight_.begin(), weight_.end(), 0.0);

    if (n > 1) {
        auto dist = distances_from(0);
        for (int i = 0; i < n; ++i)
            if (dist[static_cast<std::size_t>(i)] < 0)
                raise(Errc::DisconnectedGraph,
                      "vertex " + std::to_string(ids_[static_cast<std::size_t>(i)]) +
                          " unreachable from " + std::to_string(ids_[0]));
    }
}

int WeightedGraph::index_of(VertexId id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        raise(Errc::UnknownVertex, "vertex " + std::to_string(id) + " not in graph");
    return it->second;
}

double WeightedGraph::volume(std::span<const int> indices) const {
    double s = 0.0;
    for (int i : indices) s += weight_[static_cast<std::size_t>(i)];
    return s;
}

std::vector<int> WeightedGraph::distances_from(int source) const {
    std::vector<int> dist(static_cast<std::size_t>(num_vertices()), -1);
    std::deque<int> queue;
    dist[static_cast<std::size_t>(source)] = 0;
    queue.push_back(source);
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        for (const auto& [y, c] : adj_[static_cast<std::size_t>(x)]) {
            if (dist[static_cast<std::size_t>(y)] < 0) {
                dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
                queue.push_back(y);
            }
        }
    }
    return dist;
}

std::vector<int> WeightedGraph::ball(VertexId center, int radius) const {
    int src = index_of(center);
    std::vector<int> members;
    if (radius <= 0) return members;
    auto dist = distances_from(src);
    for (int i = 0; i < num_vertices(); ++i)
        if (dist[static_cast<std::size_t>(i)] >= 0 && dist[static_cast<std::size_t>(i)] < radius)
            members.push_back(i);
    return members;
}

WeightedGraph WeightedGraph::induced_subgraph(std::span<const int> indices) const {
    std::vector<char> keep(static_cast<std::size_t>(num_vertices()), 0);
    std::vector<VertexId> verts;
    verts.reserve(indices.size());
    for (int i : indices) {
        keep[static_cast<std::size_t>(i)] = 1;
        verts.push_back(ids_[static_cast<std::size_t>(i)]);
    }
    std::vector<EdgeInput> kept;
    for (const auto& e : edges_)
        if (keep[static_cast<std::size_t>(e.u)] && keep[static_cast<std::size_t>(e.v)])
            kept.push_back({ids_[static_cast<std::size_t>(e.u)],
                            ids_[static_cast<std::size_t>(e.v)], e.c});
    return from_parts(std::move(verts), kept);
}

int WeightedGraph::graph_diameter() const {
    int diam = 0;
    for (int i = 0; i < num_vertices(); ++i) {
        auto dist = distances_from(i);
        diam = std::max(diam, *std::max_element(dist.begin(), dist.end()));
    }
    return diam;
}

GraphExhaustion exhaust(const WeightedGraph& g, VertexId origin, std::span<const int> radii) {
    if (radii.empty() || radii[0] != 1)
        raise(Errc::BadRadiusSequence, "radius sequence must start at 1");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            raise(Errc::BadRadiusSequence, "radius sequence must be strictly increasing");
    GraphExhaustion ex;
    ex.origin = origin;
    ex.radii.assign(radii.begin(), radii.end());
    for (int r : radii) {
        ex.ball_sets.push_back(g.ball(origin, r));
        ex.levels.push_back(g.induced_subgraph(ex.ball_sets.back()));
    }
    return ex;
}

// --- generators ----------------------------------------------------------

namespace {

// Assembles a graph from integer lattice coordinates; ids follow the
// lexicographic order of the coordinates, so shared cell corners
// deduplicate bit-exactly.
struct CoordBuilder {
    std::map<std::pair<std::int64_t, std::int64_t>, int> tmp_id;
    std::vector<std::pair<std::int64_t, std::int64_t>> coords;
    std::set<std::pair<int, int>> edge_set;

    int vertex(std::int64_t x, std::int64_t y) {
        auto [it, fresh] = tmp_id.emplace(std::make_pair(x, y), static_cast<int>(coords.size()));
        if (fresh) coords.emplace_back(x, y);
        return it->second;
    }

    void edge(int a, int b) {
        edge_set.emplace(std::min(a, b), std::max(a, b));
    }

    GeneratedGraph build(const std::vector<std::pair<std::int64_t, std::int64_t>>& flagged) {
        // Canonical ids: rank in coordinate order.
        std::vector<int> order(coords.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return coords[static_cast<std::size_t>(a)] < coords[static_cast<std::size_t>(b)];
        });
        std::vector<VertexId> relabel(coords.size());
        for (std::size_t rank = 0; rank < order.size(); ++rank)
            relabel[static_cast<std::size_t>(order[rank])] = static_cast<VertexId>(rank);

        std::vector<EdgeInput> edges;
        edges.reserve(edge_set.size());
        for (const auto& [a, b] : edge_set)
            edges.push_back({relabel[static_cast<std::size_t>(a)],
                             relabel[static_cast<std::size_t>(b)], 1.0});
        std::vector<VertexId> verts(coords.size());
        std::iota(verts.begin(), verts.end(), 0);

        GeneratedGraph out;
        out.graph = WeightedGraph::from_parts(std::move(verts), edges);
        for (const auto& c : flagged) {
            auto it = tmp_id.find(c);
            if (it == tmp_id.end()) raise(Errc::Internal, "flagged coordinate missing");
            out.analytic_boundary.push_back(relabel[static_cast<std::size_t>(it->second)]);
        }
        return out;
    }
};

std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

} // namespace

GeneratedGraph make_path(int n) {
    if (n < 1) raise(Errc::ValidationError, "path length must be >= 1");
    check_budget(static_cast<std::int64_t>(n) + 1, "path");
    std::vector<EdgeInput> edges;
    edges.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) edges.push_back({i, i + 1, 1.0});
    GeneratedGraph out;
    out.graph = WeightedGraph::from_edges(edges);
    out.default_origin = 0;
    return out;
}

GeneratedGraph make_lattice_box(int dim, int side) {
    if (dim < 1 || side < 2) raise(Errc::ValidationError, "lattice_box needs dim >= 1, side >= 2");
    std::int64_t n = 1;
    for (int d = 0; d < dim; ++d) {
        n *= side;
        check_budget(n, "lattice_box");
    }
    std::vector<EdgeInput> edges;
    std::vector<std::int64_t> stride(static_cast<std::size_t>(dim), 1);
    for (int d = 1; d < dim; ++d)
        stride[static_cast<std::size_t>(d)] = stride[static_cast<std::size_t>(d - 1)] * side;
    for (std::int64_t v = 0; v < n; ++v) {
        std::int64_t rest = v;
        for (int d = 0; d < dim; ++d) {
            std::int64_t coord = (v / stride[static_cast<std::size_t>(d)]) % side;
            if (coord + 1 < side)
                edges.push_back({v, v + stride[static_cast<std::size_t>(d)], 1.0});
            (void)rest;
        }
    }
    GeneratedGraph out;
    out.graph = WeightedGraph::from_edges(edges);
    out.default_origin = 0;
    return out;
}

GeneratedGraph make_sierpinski_gasket(int level) {
    if (level < 0) raise(Errc::ValidationError, "sg level must be >= 0");
    check_budget(3 * (ipow(3, level) + 1) / 2, "sg");
    const std::int64_t side = ipow(2, level);
    CoordBuilder cb;

    // Recursive subdivision in the triangular-lattice basis; midpoints of a
    // size-2^k cell are integer, so shared corners coincide exactly.
    struct Cell {
        std::int64_t ax, ay, bx, by, cx, cy, size;
    };
    std::vector<Cell> stack{{0, 0, side, 0, 0, side, side}};
    while (!stack.empty()) {
        Cell t = stack.back();
        stack.pop_back();
        if (t.size == 1) {
            int a = cb.vertex(t.ax, t.ay);
            int b = cb.vertex(t.bx, t.by);
            int c = cb.vertex(t.cx, t.cy);
            cb.edge(a, b);
            cb.edge(b, c);
            cb.edge(a, c);
        } else {
            std::int64_t abx = (t.ax + t.bx) / 2, aby = (t.ay + t.by) / 2;
            std::int64_t acx = (t.ax + t.cx) / 2, acy = (t.ay + t.cy) / 2;
            std::int64_t bcx = (t.bx + t.cx) / 2, bcy = (t.by + t.cy) / 2;
            std::int64_t h = t.size / 2;
            stack.push_back({t.ax, t.ay, abx, aby, acx, acy, h});
            stack.push_back({abx, aby, t.bx, t.by, bcx, bcy, h});
            stack.push_back({acx, acy, bcx, bcy, t.cx, t.cy, h});
        }
    }
    auto out = cb.build({{0, 0}, {side, 0}, {0, side}});
    out.default_origin = out.analytic_boundary[0];
    return out;
}

GeneratedGraph make_vicsek_tree(int level) {
    if (level < 0) raise(Errc::ValidationError, "vicsek level must be >= 0");
    check_budget(4 * ipow(5, level) + 1, "vicsek");
    const std::int64_t side = 2 * ipow(3, level); // doubled so cell centers are integer
    CoordBuilder cb;

    struct Cell {
        std::int64_t x, y, size;
    };
    std::vector<Cell> stack{{0, 0, side}};
    while (!stack.empty()) {
        Cell q = stack.back();
        stack.pop_back();
        if (q.size == 2) {
            int c00 = cb.vertex(q.x, q.y);
            int c20 = cb.vertex(q.x + 2, q.y);
            int c02 = cb.vertex(q.x, q.y + 2);
            int c22 = cb.vertex(q.x + 2, q.y + 2);
            int mid = cb.vertex(q.x + 1, q.y + 1);
            cb.edge(mid, c00);
            cb.edge(mid, c20);
            cb.edge(mid, c02);
            cb.edge(mid, c22);
        } else {
            std::int64_t s3 = q.size / 3;
            stack.push_back({q.x, q.y, s3});
            stack.push_back({q.x + 2 * s3, q.y, s3});
            stack.push_back({q.x, q.y + 2 * s3, s3});
            stack.push_back({q.x + 2 * s3, q.y + 2 * s3, s3});
            stack.push_back({q.x + s3, q.y + s3, s3});
        }
    }
    auto out = cb.build({});
    out.default_origin = out.graph.vertex_ids().front();
    return out;
}

GeneratedGraph make_pre_carpet(int level) {
    if (level < 0) raise(Errc::ValidationError, "carpet level must be >= 0");
    const std::int64_t side = ipow(3, level);
    check_budget((side + 1) * (side + 1), "carpet");

    // A unit square survives iff no base-3 digit position has both of its
    // coordinates equal to 1 (the recursively removed middle ninths).
    auto retained = [&](std::int64_t i, std::int64_t j) {
        std::int64_t a = i, b = j;
        while (a > 0 || b > 0) {
            if (a % 3 == 1 && b % 3 == 1) return false;
            a /= 3;
            b /= 3;
        }
        return true;
    };

    CoordBuilder cb;
    for (std::int64_t i = 0; i < side; ++i) {
        for (std::int64_t j = 0; j < side; ++j) {
            if (!retained(i, j)) continue;
            int v00 = cb.vertex(i, j);
            int v10 = cb.vertex(i + 1, j);
            int v01 = cb.vertex(i, j + 1);
            int v11 = cb.vertex(i + 1, j + 1);
            cb.edge(v00, v10);
            cb.edge(v00, v01);
            cb.edge(v10, v11);
            cb.edge(v01, v11);
        }
    }
    auto out = cb.build({});
    out.default_origin = out.graph.vertex_ids().front();
    return out;
}

GeneratedGraph generate_family(const std::string& family, int level_or_n, int dim) {
    if (family == "path") return make_path(level_or_n);
    if (family == "lattice_box") return make_lattice_box(dim, level_or_n);
    if (family == "sg") return make_sierpinski_gasket(level_or_n);
    if (family == "vicsek") return make_vicsek_tree(level_or_n);
    if (family == "carpet") return make_pre_carpet(level_or_n);
    raise(Errc::ValidationError, "unknown graph family '" + family + "'");
}

} // namespace rsep
