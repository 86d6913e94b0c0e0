#pragma once

#include "rsep/bundles.hpp"
#include "rsep/graph.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rsep {

/// Probability under ν_{*,k} on n sites of one specific pattern with j
/// particles on b marked sites: (k)_j (n−k)_{b−j} / (n)_b, exact products.
double canonical_pattern_probability(int n, int k, int b, int j);

/// ν_{*,k}[obs] for an observable reading only `support` (≤ 20 sites) inside
/// an n-site set; obs receives the bitmask over support positions.
double canonical_expectation_local(int n, int k, int support_size,
                                   const std::function<double(std::uint32_t)>& obs);

/// ν_{*,k}[obs] by full enumeration of the hyperplane (n ≤ 22).
double canonical_expectation(int n, int k,
                             const std::function<double(const Configuration&)>& obs);

/// E_{ν_{*,k}} |⟨η⟩_{Λ¹} − ⟨η⟩_{Λ²}| for equal blocks of size m via the
/// hypergeometric sum; throws UnequalSizes when m1 ≠ m2.
double canonical_two_block_gap(int m1, int m2, int k);

/// The closed-form envelope m^{-1/2} (m/(2m−1))^{1/2}.
double two_block_bound(int m);

/// E[Y] = k/2 and Var(Y) = (k/2)(1 − k/2m)(m/(2m−1)) for the hypergeometric
/// block count Y with parameters (2m, m, k).
double hypergeometric_mean(int k);
double hypergeometric_variance(int m, int k);

struct TwoBlockRow {
    int m = 0;
    double sup_gap = 0.0;          // sup_k of the hypergeometric sum
    int argmax_k = 0;
    double bound = 0.0;            // the m^{-1/2}(m/(2m-1))^{1/2} envelope
    double enumeration_gap = 0.0;  // max_k |sum formula − exhaustive enumeration|
    double variance_gap = 0.0;     // max_k |Var formula − enumerated variance|
    double mean_gap = 0.0;         // max_k |k/2 − enumerated mean|
    bool bound_holds = false;
};

/// Exhaustive verification for every block size in `sizes` (each ≤ 14) and
/// every particle number k: the gap expectation, its bound, and the
/// mean/variance formulas, cross-checked against full enumeration.
std::vector<TwoBlockRow> verify_two_block_bound(std::span<const int> sizes);

struct EnsembleRow {
    int set_size = 0;
    double sup_gap = 0.0; // sup_k |ν_{*,k}[φ_p] − ν_{k/n}[φ_p]|
    int argmax_k = 0;
};

/// Equivalence-of-ensembles decay table for a bundle anchored at `anchor`:
/// every set must contain the dependency ball. Sizes are the |Λ_j|.
std::vector<EnsembleRow> equivalence_of_ensembles_table(
    const WeightedGraph& g, const LocalFunctionBundle& bundle, int anchor,
    std::span<const int> set_sizes);

} // namespace rsep
