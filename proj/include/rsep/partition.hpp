#pragma once

#include "rsep/graph.hpp"

#include <span>
#include <vector>

namespace rsep {

/// Partition of the averaging ball B(p, r_ball) into the reference block
/// Λ_j(p), equal-size blocks Λ_j(y_i), and one strictly smaller tail.
/// Blocks need not be connected; per-block connected components carry the
/// bridge vertices z_i used by the two-block generator.
struct Partition {
    int center = 0;                       // dense index of p
    std::vector<int> reference_block;     // Λ_j(p), connected, contains p
    std::vector<std::vector<int>> blocks; // Λ_j(y_i), each of |Λ_j(p)| vertices
    std::vector<int> tail;                // < |Λ_j(p)| vertices
    std::vector<int> ball;                // B(p, r_ball)

    /// components[b] lists the connected components of blocks[b].
    std::vector<std::vector<std::vector<int>>> components;
    /// bridges[b] = {z_0, z_1, …, z_B}: z_0 = min id of the reference block,
    /// z_i = min id of component i, ordered by component minimum.
    std::vector<std::vector<int>> bridges;

    int block_size() const { return static_cast<int>(reference_block.size()); }
    /// L = ⌊|ball| / |Λ_j(p)|⌋, counting the reference block.
    int num_blocks() const { return 1 + static_cast<int>(blocks.size()); }
};

/// Greedy carving: the reference block is the radius-r_block ball around p;
/// remaining ball vertices are peeled in BFS order from the smallest
/// unassigned id into exact-size chunks, leftover becomes the tail.
/// Throws BallTooSmall unless at least two blocks fit.
Partition build_partition(const WeightedGraph& g, VertexId p, int block_radius,
                          int ball_radius);

/// |LHS − RHS| of the block/tail averaging identity for arbitrary values:
/// ⟨g⟩_{Λ_1} − ⟨g⟩_Λ decomposed over blocks and tails. Elements are indices
/// into `values`; throws NotAPartition on overlap or empty parts.
double averaging_residual(const std::vector<std::vector<int>>& blocks,
                          const std::vector<std::vector<int>>& tails,
                          std::span<const double> values);

} // namespace rsep
