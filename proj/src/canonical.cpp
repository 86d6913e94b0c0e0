#include "rsep/canonical.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace rsep {

double canonical_pattern_probability(int n, int k, int b, int j) {
    if (j < 0 || j > k || b - j > n - k) return 0.0;
    // (k)_j (n-k)_{b-j} / (n)_b as interleaved exact products
    double p = 1.0;
    int num1 = k, num2 = n - k, den = n;
    for (int t = 0; t < j; ++t) p *= static_cast<double>(num1--) / den--;
    for (int t = 0; t < b - j; ++t) p *= static_cast<double>(num2--) / den--;
    return p;
}

double canonical_expectation_local(int n, int k, int support_size,
                                   const std::function<double(std::uint32_t)>& obs) {
    if (k < 0 || k > n) raise(Errc::KOutOfRange, "particle number outside 0..n");
    if (support_size > 20) raise(Errc::BallTooLarge, "support enumeration capped at 20 sites");
    if (support_size > n) raise(Errc::ValidationError, "support larger than the site set");
    double total = 0.0;
    const std::uint32_t masks = 1u << support_size;
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        int j = std::popcount(mask);
        double p = canonical_pattern_probability(n, k, support_size, j);
        if (p > 0.0) total += p * obs(mask);
    }
    return total;
}

double canonical_expectation(int n, int k,
                             const std::function<double(const Configuration&)>& obs) {
    if (k < 0 || k > n) raise(Errc::KOutOfRange, "particle number outside 0..n");
    if (n > 22) raise(Errc::StateSpaceTooLarge, "exact enumeration capped at 22 sites");
    auto states = hyperplane_states(n, k);
    double total = 0.0;
    for (auto s : states) total += obs(Configuration::from_state(s, n));
    return total / static_cast<double>(states.size());
}

namespace {

// Binomial coefficients up to C(28,14) fit uint64 exactly.
std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) /
                                     static_cast<std::uint64_t>(i);
    return r;
}

} // namespace

double canonical_two_block_gap(int m1, int m2, int k) {
    if (m1 != m2) raise(Errc::UnequalSizes, "two-block gap formula needs equal block sizes");
    const int m = m1;
    if (k < 0 || k > 2 * m) raise(Errc::KOutOfRange, "particle number outside 0..2m");
    const double denom = static_cast<double>(binom(2 * m, k));
    double total = 0.0;
    for (int j = std::max(0, k - m); j <= std::min(k, m); ++j) {
        double p = static_cast<double>(binom(m, j)) * static_cast<double>(binom(m, k - j)) /
                   denom;
        total += p * std::abs(2.0 * j - k) / m;
    }
    return total;
}

double two_block_bound(int m) {
    return std::sqrt(static_cast<double>(m) / (2.0 * m - 1.0)) / std::sqrt(static_cast<double>(m));
}

double hypergeometric_mean(int k) { return 0.5 * k; }

double hypergeometric_variance(int m, int k) {
    double kk = k;
    double mm = m;
    return 0.5 * kk * (1.0 - kk / (2.0 * mm)) * (mm / (2.0 * mm - 1.0));
}

std::vector<TwoBlockRow> verify_two_block_bound(std::span<const int> sizes) {
    std::vector<TwoBlockRow> rows;
    for (int m : sizes) {
        if (m < 1 || m > 14)
            raise(Errc::ValidationError, "exhaustive two-block check needs 1 <= m <= 14");
        TwoBlockRow row;
        row.m = m;
        row.bound = two_block_bound(m);

        // One pass over all 2^(2m) configurations: per particle number k,
        // accumulate Σ|2j−k| and the block-count moments. The summands are
        // integers, so integer accumulators keep the enumeration exact
        // (doubles would drift past 1e-12 over 2^28 terms).
        const int n = 2 * m;
        std::vector<std::uint64_t> gap_sum(static_cast<std::size_t>(n) + 1, 0);
        std::vector<std::uint64_t> y_sum(static_cast<std::size_t>(n) + 1, 0);
        std::vector<std::uint64_t> y2_sum(static_cast<std::size_t>(n) + 1, 0);
        std::vector<std::uint64_t> count(static_cast<std::size_t>(n) + 1, 0);
        const std::uint64_t lim = std::uint64_t{1} << n;
        const std::uint64_t low_mask = (std::uint64_t{1} << m) - 1;
        for (std::uint64_t mask = 0; mask < lim; ++mask) {
            int k = std::popcount(mask);
            int j = std::popcount(mask & low_mask);
            auto uk = static_cast<std::size_t>(k);
            gap_sum[uk] += static_cast<std::uint64_t>(std::abs(2 * j - k));
            y_sum[uk] += static_cast<std::uint64_t>(j);
            y2_sum[uk] += static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(j);
            ++count[uk];
        }

        row.bound_holds = true;
        for (int k = 0; k <= n; ++k) {
            auto uk = static_cast<std::size_t>(k);
            double exact = canonical_two_block_gap(m, m, k);
            double enumerated = static_cast<double>(gap_sum[uk]) /
                                (static_cast<double>(m) * static_cast<double>(count[uk]));
            row.enumeration_gap = std::max(row.enumeration_gap, std::abs(exact - enumerated));
            if (exact > row.sup_gap) {
                row.sup_gap = exact;
                row.argmax_k = k;
            }
            if (exact > row.bound + 1e-12) row.bound_holds = false;

            double mean_enum =
                static_cast<double>(y_sum[uk]) / static_cast<double>(count[uk]);
            double var_enum = static_cast<double>(y2_sum[uk]) /
                                  static_cast<double>(count[uk]) -
                              mean_enum * mean_enum;
            row.mean_gap =
                std::max(row.mean_gap, std::abs(mean_enum - hypergeometric_mean(k)));
            row.variance_gap = std::max(row.variance_gap,
                                        std::abs(var_enum - hypergeometric_variance(m, k)));
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<EnsembleRow> equivalence_of_ensembles_table(
    const WeightedGraph& g, const LocalFunctionBundle& bundle, int anchor,
    std::span<const int> set_sizes) {
    auto ball = dependency_ball(g, bundle, anchor);
    const int b = static_cast<int>(ball.size());
    GlobalAverage phi(g, bundle, anchor);

    // Observable over the ball pattern, reused across set sizes: the
    // canonical probability of a pattern depends only on (n, k, |pattern|).
    Configuration eta(g.num_vertices());
    auto phi_of_mask = [&](std::uint32_t mask) {
        for (int i = 0; i < b; ++i)
            eta.set(ball[static_cast<std::size_t>(i)], (mask >> i) & 1u);
        return bundle.eval(g, anchor, eta);
    };

    std::vector<EnsembleRow> rows;
    for (int n : set_sizes) {
        if (n < b)
            raise(Errc::ValidationError,
                  "each ensemble set must contain the dependency ball (need >= " +
                      std::to_string(b) + " sites)");
        EnsembleRow row;
        row.set_size = n;
        for (int k = 0; k <= n; ++k) {
            double canonical = canonical_expectation_local(n, k, b, phi_of_mask);
            double grand = phi(static_cast<double>(k) / n);
            double gap = std::abs(canonical - grand);
            if (gap > row.sup_gap) {
                row.sup_gap = gap;
                row.argmax_k = k;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace rsep
