#pragma once

#include "rsep/graph.hpp"
#include "rsep/sep.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rsep {

/// Family of local observables φ_p, each depending only on the occupancies
/// inside B(p, r_φ) (for edge bundles, the ball around the tail vertex).
struct LocalFunctionBundle {
    enum class Kind { Vertex, Edge };

    Kind kind = Kind::Vertex;
    double radius = 1.0;
    std::string name;
    /// anchor: dense vertex index (Vertex) or edge index (Edge).
    std::function<double(const WeightedGraph&, int anchor, const Configuration&)> eval;
};

/// The canonical bundles: "occupancy" (η(x)), "pair" (Σ_y η(x)η(y)),
/// "pair-conductance" (Σ_y c_xy η(x)η(y)), "edge-product" (c_e η(e̲)η(ē)).
LocalFunctionBundle make_bundle(const std::string& name);
std::vector<std::string> bundle_names();

/// Anchor vertex p: the vertex itself, or the tail of an edge.
int anchor_vertex(const WeightedGraph& g, const LocalFunctionBundle& bundle, int anchor);

/// Vertices the observable may read: B(p, r_φ), sorted dense indices.
std::vector<int> dependency_ball(const WeightedGraph& g, const LocalFunctionBundle& bundle,
                                 int anchor);

/// Global average Φ_p(α) = ν_α[φ_p], exact via one enumeration of the
/// dependency ball (level sums over particle counts). Throws BallTooLarge
/// above 20 ball vertices.
class GlobalAverage {
public:
    GlobalAverage(const WeightedGraph& g, const LocalFunctionBundle& bundle, int anchor);

    double operator()(double alpha) const;
    /// max |Φ'| over a grid; finite because Φ is a polynomial in α.
    double lipschitz_modulus(int grid = 101) const;
    const std::vector<int>& ball() const { return ball_; }

private:
    std::vector<int> ball_;
    std::vector<double> level_sums_; // w_j = Σ_{|S|=j} φ(η_S)
};

/// U_{N,ε}, U^{(1)}_j, U^{(2)}_{N,ε,j} for one anchor; the decomposition
/// U_{N,ε} = U^{(1)} + U^{(2)} holds exactly by construction.
struct UFields {
    double u_ne;
    double u_one;
    double u_two;
};

struct UFieldContext {
    const WeightedGraph* g = nullptr;
    LocalFunctionBundle bundle;
    int anchor = 0;
    std::vector<int> block; // Λ_j(p), must contain the dependency ball's anchor
    std::vector<int> ball;  // B(p, r_{εN}), must contain the block
    GlobalAverage phi;

    UFieldContext(const WeightedGraph& graph, LocalFunctionBundle b, int anchor_,
                  std::vector<int> block_, std::vector<int> ball_);
};

UFields evaluate_u(const UFieldContext& ctx, const Configuration& eta);

/// Ũ^{(2)}_{j,x,y}(η) = ⟨η⟩_{Λ_j(x)} − ⟨η⟩_{Λ_j(y)}.
double u_tilde_two(const Configuration& eta, std::span<const int> block_x,
                   std::span<const int> block_y);

double block_average(const Configuration& eta, std::span<const int> block);

} // namespace rsep
