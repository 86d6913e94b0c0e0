#pragma once

#include "rsep/boundary.hpp"
#include "rsep/graph.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rsep {

/// Hard cap for dense 2^n state-space work.
inline constexpr int kStateCap = 14;

/// Occupation map η : V → {0,1} over the dense vertex order.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(int n) : occ_(static_cast<std::size_t>(n), 0) {}

    static Configuration from_state(std::uint64_t state, int n);

    int size() const { return static_cast<int>(occ_.size()); }
    bool at(int i) const { return occ_[static_cast<std::size_t>(i)] != 0; }
    void set(int i, bool v);

    /// η^{xy}: exchanges the occupancies of x and y (an involution).
    void apply_swap(int x, int y);
    /// η^a: flips the occupancy at a (an involution).
    void apply_flip(int a);

    Configuration swapped(int x, int y) const;
    Configuration flipped(int a) const;

    int particle_count() const { return count_; }
    std::uint64_t state_index() const;

    bool operator==(const Configuration& other) const { return occ_ == other.occ_; }

private:
    std::vector<std::uint8_t> occ_;
    int count_ = 0;
};

struct Transition {
    enum class Kind { Swap, Flip };
    Kind kind;
    int x = -1; // dense index; swap partner in y
    int y = -1;
    double rate = 0.0;
};

/// Transitions active from η: each discrepant edge with its conductance,
/// each reservoir with λ_+ (empty site) or λ_- (occupied site).
std::vector<Transition> active_rates(const WeightedGraph& g, const BoundarySpec* spec,
                                     const Configuration& eta);

/// ν_α, ν_{γ(·)}, or an explicit distribution on 2^|V| states.
struct MeasureSpec {
    enum class Kind { ProductConstant, ProductProfile, Explicit };

    static MeasureSpec product(double alpha);
    static MeasureSpec product_profile(std::vector<double> profile);
    static MeasureSpec explicit_distribution(std::vector<double> weights);

    Kind kind = Kind::ProductConstant;
    double alpha = 0.5;
    std::vector<double> profile;
    std::vector<double> weights;

    /// Probability of a configuration (product kinds need n = |V| sites).
    double mass(const Configuration& eta) const;
    double mass_of_state(std::uint64_t state, int n) const;
};

enum class GeneratorPart { Exchange, Boundary, Full };

/// Row-sum-zero rate matrix on {0,1}^V, state s has vertex i at bit i.
/// Throws StateSpaceTooLarge above kStateCap vertices.
Eigen::SparseMatrix<double> generator_matrix(const WeightedGraph& g, const BoundarySpec* spec,
                                             GeneratorPart part = GeneratorPart::Full);

/// All states with exactly k particles, ascending.
std::vector<std::uint64_t> hyperplane_states(int n, int k);

/// Sub-generator restricted to a set of states (rows re-normalized so each
/// row still sums to zero over the kept columns only when the set is closed
/// under the dynamics; for conservative dynamics on a hyperplane it is).
Eigen::SparseMatrix<double> restrict_generator(const Eigen::SparseMatrix<double>& q,
                                               std::span<const std::uint64_t> states);

/// Left null vector of an irreducible generator, normalized to a
/// probability vector; residual ‖μQ‖_∞ ≤ 1e-10 enforced.
struct StationaryResult {
    std::vector<double> weights;
    double residual = 0.0;
};
StationaryResult stationary_distribution(const Eigen::SparseMatrix<double>& q);

/// Marginal occupation probabilities per vertex under an explicit measure.
std::vector<double> one_site_marginals(std::span<const double> weights, int n);

/// max over transitions of |μ(η) q(η,η') − μ(η') q(η',η)|.
double detailed_balance_residual(const WeightedGraph& g, const BoundarySpec* spec,
                                 GeneratorPart part, const MeasureSpec& measure);

struct SwapMove {
    int x;
    int y;
};
struct FlipMove {
    int a;
};

/// dν_h(η^{xy})/dν_h(η) and dν_h(η^a)/dν_h(η) for a product measure with
/// marginals in (0,1). Exact two-factor (resp. one-factor) ratio.
double radon_nikodym_ratio(const MeasureSpec& nu, const Configuration& eta, SwapMove move);
double radon_nikodym_ratio(const MeasureSpec& nu, const Configuration& eta, FlipMove move);

/// μ0 · exp(tQ) by uniformization; probabilistically exact reference for the
/// simulator tests.
std::vector<double> transient_distribution(const Eigen::SparseMatrix<double>& q,
                                           std::span<const double> mu0, double t);

} // namespace rsep
