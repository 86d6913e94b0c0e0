#include "rsep/partition.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace rsep {

namespace {

std::vector<std::vector<int>> connected_components(const WeightedGraph& g,
                                                   std::span<const int> block) {
    std::set<int> remaining(block.begin(), block.end());
    std::vector<std::vector<int>> comps;
    while (!remaining.empty()) {
        int seed = *remaining.begin();
        std::vector<int> comp;
        std::deque<int> queue{seed};
        remaining.erase(seed);
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            comp.push_back(x);
            for (auto [y, c] : g.neighbors(x)) {
                auto it = remaining.find(y);
                if (it != remaining.end()) {
                    remaining.erase(it);
                    queue.push_back(y);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return comps;
}

} // namespace

Partition build_partition(const WeightedGraph& g, VertexId p, int block_radius,
                          int ball_radius) {
    if (block_radius < 1 || ball_radius <= block_radius)
        raise(Errc::ValidationError, "need 1 <= block radius < ball radius");
    Partition part;
    part.center = g.index_of(p);
    part.reference_block = g.ball(p, block_radius);
    part.ball = g.ball(p, ball_radius);
    const int s = static_cast<int>(part.reference_block.size());
    const int total = static_cast<int>(part.ball.size());
    if (total / s < 2)
        raise(Errc::BallTooSmall, "averaging ball holds fewer than two blocks of size " +
                                      std::to_string(s));

    std::set<int> unassigned(part.ball.begin(), part.ball.end());
    for (int v : part.reference_block) unassigned.erase(v);

    while (static_cast<int>(unassigned.size()) >= s) {
        // Chunk in BFS order from the smallest unassigned id; when a pocket
        // of unassigned vertices runs out, restart from the next smallest.
        std::vector<int> chunk;
        std::set<int> pending = unassigned;
        std::deque<int> queue;
        while (static_cast<int>(chunk.size()) < s) {
            if (queue.empty()) {
                int seed = *pending.begin();
                pending.erase(seed);
                queue.push_back(seed);
            }
            int x = queue.front();
            queue.pop_front();
            chunk.push_back(x);
            for (auto [y, c] : g.neighbors(x)) {
                auto it = pending.find(y);
                if (it != pending.end()) {
                    pending.erase(it);
                    queue.push_back(y);
                }
            }
        }
        std::sort(chunk.begin(), chunk.end());
        for (int v : chunk) unassigned.erase(v);
        part.blocks.push_back(std::move(chunk));
    }
    part.tail.assign(unassigned.begin(), unassigned.end());

    // partition axioms: disjoint exact cover, uniform block size, small tail
    std::set<int> seen;
    auto absorb = [&](std::span<const int> piece) {
        for (int v : piece)
            if (!seen.insert(v).second) raise(Errc::Internal, "partition pieces overlap");
    };
    absorb(part.reference_block);
    for (const auto& b : part.blocks) {
        if (static_cast<int>(b.size()) != s) raise(Errc::Internal, "block size mismatch");
        absorb(b);
    }
    absorb(part.tail);
    if (static_cast<int>(seen.size()) != total || static_cast<int>(part.tail.size()) >= s)
        raise(Errc::Internal, "partition does not cover the ball exactly");
    if (part.num_blocks() != total / s) raise(Errc::Internal, "block count mismatch");

    int z0 = *std::min_element(part.reference_block.begin(), part.reference_block.end());
    for (const auto& block : part.blocks) {
        auto comps = connected_components(g, block);
        std::vector<int> bridge{z0};
        for (const auto& comp : comps) bridge.push_back(comp.front());
        part.components.push_back(std::move(comps));
        part.bridges.push_back(std::move(bridge));
    }
    return part;
}

double averaging_residual(const std::vector<std::vector<int>>& blocks,
                          const std::vector<std::vector<int>>& tails,
                          std::span<const double> values) {
    if (blocks.empty()) raise(Errc::NotAPartition, "need at least one block");
    std::set<int> seen;
    double whole_sum = 0.0;
    std::size_t whole_count = 0;
    auto absorb = [&](const std::vector<int>& piece) {
        if (piece.empty()) raise(Errc::NotAPartition, "empty part");
        for (int v : piece) {
            if (v < 0 || v >= static_cast<int>(values.size()))
                raise(Errc::NotAPartition, "element outside the value table");
            if (!seen.insert(v).second) raise(Errc::NotAPartition, "parts overlap");
            whole_sum += values[static_cast<std::size_t>(v)];
            ++whole_count;
        }
    };
    for (const auto& b : blocks) absorb(b);
    for (const auto& t : tails) absorb(t);

    auto avg = [&](const std::vector<int>& piece) {
        double s = 0.0;
        for (int v : piece) s += values[static_cast<std::size_t>(v)];
        return s / static_cast<double>(piece.size());
    };

    const auto big_l = static_cast<double>(blocks.size());
    const double whole_avg = whole_sum / static_cast<double>(whole_count);
    const double avg1 = avg(blocks[0]);
    double lhs = avg1 - whole_avg;

    double rhs = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        double frac = static_cast<double>(blocks[i].size()) / static_cast<double>(whole_count);
        double ai = avg(blocks[i]);
        if (i > 0) rhs += 0.5 * (1.0 / big_l + frac) * (avg1 - ai);
        rhs += 0.5 * (1.0 / big_l - frac) * (avg1 + ai);
    }
    for (const auto& t : tails) {
        double frac = static_cast<double>(t.size()) / static_cast<double>(whole_count);
        rhs -= frac * avg(t);
    }
    return std::abs(lhs - rhs);
}

} // namespace rsep
