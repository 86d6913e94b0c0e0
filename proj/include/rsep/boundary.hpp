#pragma once

#include "rsep/graph.hpp"

#include <vector>

namespace rsep {

/// Reservoir description for the boundary-driven process: boundary vertices
/// with creation/annihilation rates λ_±(a). Condition (BR) holds by
/// construction with the derived γ, γ'.
struct BoundarySpec {
    std::vector<VertexId> vertices;
    std::vector<double> lambda_plus;
    std::vector<double> lambda_minus;

    std::size_t size() const { return vertices.size(); }

    /// γ = max_a max(λ+/λ-, λ-/λ+), clamped to ≥ 1.
    double gamma() const;
    /// γ' = max_a max(λ+(a)/c_a, c_a/λ+(a)), clamped to ≥ 1.
    double gamma_prime(const WeightedGraph& g) const;
    /// δ = 1/(1+γ) ∈ (0, 1/2].
    double delta() const { return 1.0 / (1.0 + gamma()); }

    /// ρ̄(a) = λ+(a)/(λ+(a)+λ-(a)), the reservoir target density.
    double target_density(std::size_t i) const {
        return lambda_plus[i] / (lambda_plus[i] + lambda_minus[i]);
    }

    /// Throws RateNonpositive / EmptyBoundary / UnknownVertex /
    /// BoundaryEdgePresent. The no-boundary-edge restriction mirrors the
    /// c_{aa'} = 0 simplification the theory is stated under.
    void validate(const WeightedGraph& g) const;
};

} // namespace rsep
