#include "rsep/boundary.hpp"

#include <algorithm>
#include <set>

namespace rsep {

double BoundarySpec::gamma() const {
    double g = 1.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        double r = lambda_plus[i] / lambda_minus[i];
        g = std::max({g, r, 1.0 / r});
    }
    return g;
}

double BoundarySpec::gamma_prime(const WeightedGraph& g) const {
    double gp = 1.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        double ca = g.weight(g.index_of(vertices[i]));
        double r = lambda_plus[i] / ca;
        gp = std::max({gp, r, 1.0 / r});
    }
    return gp;
}

void BoundarySpec::validate(const WeightedGraph& g) const {
    if (vertices.empty()) raise(Errc::EmptyBoundary, "boundary spec has no vertices");
    if (lambda_plus.size() != vertices.size() || lambda_minus.size() != vertices.size())
        raise(Errc::ValidationError, "boundary rate arrays do not match vertex list");
    std::set<int> bset;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        int idx = g.index_of(vertices[i]);
        if (!bset.insert(idx).second)
            raise(Errc::ValidationError,
                  "duplicate boundary vertex " + std::to_string(vertices[i]));
        if (!(lambda_plus[i] > 0.0) || !(lambda_minus[i] > 0.0))
            raise(Errc::RateNonpositive,
                  "rates at vertex " + std::to_string(vertices[i]) + " must be positive");
    }
    for (const auto& e : g.edges())
        if (bset.count(e.u) && bset.count(e.v))
            raise(Errc::BoundaryEdgePresent,
                  "edge joins boundary vertices " + std::to_string(g.id_of(e.u)) + " and " +
                      std::to_string(g.id_of(e.v)));
}

} // namespace rsep
