#include "rsep/bundles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace rsep {

LocalFunctionBundle make_bundle(const std::string& name) {
    LocalFunctionBundle b;
    b.name = name;
    if (name == "occupancy") {
        b.kind = LocalFunctionBundle::Kind::Vertex;
        b.radius = 1.0;
        b.eval = [](const WeightedGraph&, int x, const Configuration& eta) {
            return eta.at(x) ? 1.0 : 0.0;
        };
        return b;
    }
    if (name == "pair" || name == "pair-conductance") {
        bool weighted = name == "pair-conductance";
        b.kind = LocalFunctionBundle::Kind::Vertex;
        b.radius = 2.0;
        b.eval = [weighted](const WeightedGraph& g, int x, const Configuration& eta) {
            if (!eta.at(x)) return 0.0;
            double sum = 0.0;
            for (auto [y, c] : g.neighbors(x))
                if (eta.at(y)) sum += weighted ? c : 1.0;
            return sum;
        };
        return b;
    }
    if (name == "edge-product") {
        b.kind = LocalFunctionBundle::Kind::Edge;
        b.radius = 2.0;
        b.eval = [](const WeightedGraph& g, int e, const Configuration& eta) {
            const auto& edge = g.edges()[static_cast<std::size_t>(e)];
            return eta.at(edge.u) && eta.at(edge.v) ? edge.c : 0.0;
        };
        return b;
    }
    raise(Errc::ValidationError, "unknown bundle '" + name + "'");
}

std::vector<std::string> bundle_names() {
    return {"occupancy", "pair", "pair-conductance", "edge-product"};
}

int anchor_vertex(const WeightedGraph& g, const LocalFunctionBundle& bundle, int anchor) {
    if (bundle.kind == LocalFunctionBundle::Kind::Vertex) {
        if (anchor < 0 || anchor >= g.num_vertices())
            raise(Errc::UnknownVertex, "bundle anchor out of range");
        return anchor;
    }
    if (anchor < 0 || anchor >= g.num_edges())
        raise(Errc::ValidationError, "edge anchor out of range");
    return g.edges()[static_cast<std::size_t>(anchor)].u; // tail
}

std::vector<int> dependency_ball(const WeightedGraph& g, const LocalFunctionBundle& bundle,
                                 int anchor) {
    int p = anchor_vertex(g, bundle, anchor);
    auto dist = g.distances_from(p);
    std::vector<int> ball;
    for (int i = 0; i < g.num_vertices(); ++i)
        if (dist[static_cast<std::size_t>(i)] >= 0 &&
            static_cast<double>(dist[static_cast<std::size_t>(i)]) < bundle.radius)
            ball.push_back(i);
    return ball;
}

GlobalAverage::GlobalAverage(const WeightedGraph& g, const LocalFunctionBundle& bundle,
                             int anchor) {
    ball_ = dependency_ball(g, bundle, anchor);
    const int k = static_cast<int>(ball_.size());
    if (k > 20)
        raise(Errc::BallTooLarge,
              "global average enumerates 2^" + std::to_string(k) + " configurations");
    level_sums_.assign(static_cast<std::size_t>(k) + 1, 0.0);
    Configuration eta(g.num_vertices());
    const std::uint32_t masks = 1u << k;
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        for (int i = 0; i < k; ++i)
            eta.set(ball_[static_cast<std::size_t>(i)], (mask >> i) & 1u);
        int ones = std::popcount(mask);
        level_sums_[static_cast<std::size_t>(ones)] += bundle.eval(g, anchor, eta);
    }
}

double GlobalAverage::operator()(double alpha) const {
    const int k = static_cast<int>(level_sums_.size()) - 1;
    // Σ_j w_j α^j (1-α)^{k-j}, evaluated with running powers.
    double result = 0.0;
    for (int j = 0; j <= k; ++j) {
        double w = level_sums_[static_cast<std::size_t>(j)];
        if (w == 0.0) continue;
        result += w * std::pow(alpha, j) * std::pow(1.0 - alpha, k - j);
    }
    return result;
}

double GlobalAverage::lipschitz_modulus(int grid) const {
    const int k = static_cast<int>(level_sums_.size()) - 1;
    double best = 0.0;
    for (int t = 0; t <= grid; ++t) {
        double a = static_cast<double>(t) / grid;
        double deriv = 0.0;
        for (int j = 0; j <= k; ++j) {
            double w = level_sums_[static_cast<std::size_t>(j)];
            if (w == 0.0) continue;
            if (j > 0) deriv += w * j * std::pow(a, j - 1) * std::pow(1.0 - a, k - j);
            if (k - j > 0) deriv -= w * (k - j) * std::pow(a, j) * std::pow(1.0 - a, k - j - 1);
        }
        best = std::max(best, std::abs(deriv));
    }
    return best;
}

UFieldContext::UFieldContext(const WeightedGraph& graph, LocalFunctionBundle b, int anchor_,
                             std::vector<int> block_, std::vector<int> ball_)
    : g(&graph), bundle(std::move(b)), anchor(anchor_), block(std::move(block_)),
      ball(std::move(ball_)), phi(graph, bundle, anchor_) {
    auto sorted = [](std::vector<int> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    auto sb = sorted(block);
    auto sp = sorted(ball);
    if (block.empty() || ball.empty() ||
        !std::includes(sp.begin(), sp.end(), sb.begin(), sb.end()))
        raise(Errc::InconsistentPartition, "block must sit inside the averaging ball");
    for (int v : ball)
        if (v < 0 || v >= graph.num_vertices())
            raise(Errc::InconsistentPartition, "ball vertex outside graph");
}

double block_average(const Configuration& eta, std::span<const int> block) {
    int count = 0;
    for (int v : block)
        if (eta.at(v)) ++count;
    return static_cast<double>(count) / static_cast<double>(block.size());
}

UFields evaluate_u(const UFieldContext& ctx, const Configuration& eta) {
    if (eta.size() != ctx.g->num_vertices())
        raise(Errc::InconsistentPartition, "configuration does not match context graph");
    double phi_eta = ctx.bundle.eval(*ctx.g, ctx.anchor, eta);
    double phi_block = ctx.phi(block_average(eta, ctx.block));
    double phi_ball = ctx.phi(block_average(eta, ctx.ball));
    UFields u;
    u.u_one = phi_eta - phi_block;
    u.u_two = phi_block - phi_ball;
    u.u_ne = u.u_one + u.u_two; // identical to φ − Φ(ball average), exactly
    return u;
}

double u_tilde_two(const Configuration& eta, std::span<const int> block_x,
                   std::span<const int> block_y) {
    return block_average(eta, block_x) - block_average(eta, block_y);
}

} // namespace rsep
