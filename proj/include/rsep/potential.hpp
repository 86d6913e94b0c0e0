#pragma once

#include "rsep/boundary.hpp"
#include "rsep/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rsep {

/// Default relative residual for the sparse solves.
inline constexpr double kDefaultTol = 1e-10;

/// Σ_{xy∈E} c_xy [f(x)−f(y)]², each undirected edge counted once.
/// `f` is indexed by dense vertex index.
double dirichlet_energy(const WeightedGraph& g, std::span<const double> f);

struct HarmonicField {
    std::vector<double> values;      // by dense index
    std::vector<int> boundary;       // dense indices the field was solved against
    std::vector<double> boundary_values;
    double residual = 0.0;           // max |Σ_y c_xy (h(y)-h(x))| over interior x
};

/// Solves the Dirichlet problem: harmonic on V∖boundary with the given
/// boundary data. `boundary` holds dense indices. A boundary equal to all
/// of V is allowed and returns the data unchanged.
HarmonicField solve_harmonic(const WeightedGraph& g, std::span<const int> boundary,
                             std::span<const double> values, double tol = kDefaultTol);

/// Effective resistance between disjoint nonempty vertex sets (dense
/// indices): inverse of the minimal Dirichlet energy among potentials that
/// are 1 on `a1` and 0 on `a2`.
double effective_resistance(const WeightedGraph& g, std::span<const int> a1,
                            std::span<const int> a2, double tol = kDefaultTol);
double effective_resistance(const WeightedGraph& g, VertexId x, VertexId y,
                            double tol = kDefaultTol);

/// Green's function of the jump chain killed upon exiting A:
/// G^A = (I − P|_A)^{-1}, entries ordered as `a_set`.
Eigen::MatrixXd green_function(const WeightedGraph& g, std::span<const int> a_set);

/// Expected jump-chain steps to leave `a_set`, for every start in `a_set`
/// (same order). Solves L|_A t = c|_A.
Eigen::VectorXd exit_times(const WeightedGraph& g, std::span<const int> a_set,
                           double tol = kDefaultTol);
/// Mean exit time from `a_set` started at x; 0 if x is already outside.
double mean_exit_time(const WeightedGraph& g, VertexId x, std::span<const int> a_set,
                      double tol = kDefaultTol);
/// Mean hitting time of `target` started at x; 0 if x is in the target.
double hitting_time(const WeightedGraph& g, VertexId x, std::span<const int> target,
                    double tol = kDefaultTol);

struct CommuteTime {
    double hitting_sum; // E^y[T_z] + E^z[T_y] from two linear solves
    double identity;    // 𝒱(G) · R_eff(y,z)
};
CommuteTime commute_time(const WeightedGraph& g, VertexId y, VertexId z,
                         double tol = kDefaultTol);

/// Electric flow of h out of vertex a: i_h(a) = Σ_y c_ay [h(y) − h(a)].
double flow(const WeightedGraph& g, std::span<const double> h, VertexId a);

/// Trace of the random walk onto ∂V: boundary-to-boundary conductances
/// ĉ_{a,b} = Σ_y c_ay h^b(y) from the harmonic basis {h^b}.
struct TraceNetwork {
    std::vector<int> boundary;        // dense indices, sorted
    std::vector<double> c_boundary;   // c_a per boundary vertex
    Eigen::MatrixXd chat;             // ĉ_{a,b}
    Eigen::MatrixXd harmonic_basis;   // n × |∂V|, column b = h^b

    /// p̃(a,b) = ĉ_{a,b}/c_a, a stochastic kernel.
    Eigen::MatrixXd kernel() const;
    /// Tr_{∂V}ℰ(g) = ½ Σ_{a,b} ĉ_{a,b} [g(a)−g(b)]².
    double trace_energy(std::span<const double> boundary_values) const;
    /// Harmonic extension of boundary data, h_g = Σ_b g(b) h^b.
    std::vector<double> harmonic_extension(std::span<const double> boundary_values) const;
};

TraceNetwork trace_network(const WeightedGraph& g, std::span<const int> boundary,
                           double tol = kDefaultTol);

/// One-site marginals of the boundary-driven stationary measure.
struct DensityProfile {
    std::vector<double> rho;     // by dense index, inside the Cor. 5.4 box
    std::vector<double> flows;   // i_ρ(a), aligned with spec.vertices
    double energy = 0.0;         // ℰ^el(ρ)
    double route_gap = 0.0;      // sup gap between the Robin and the trace route
    double lower_bound = 0.0;    // 1/(1+γ)
    double upper_bound = 1.0;    // γ/(1+γ)
};

/// Solves the Robin system for ρ directly and, independently, through the
/// Dirichlet-to-Neumann reduction; throws InconsistentSolutions if the two
/// routes disagree beyond `tol`.
DensityProfile stationary_marginal(const WeightedGraph& g, const BoundarySpec& spec,
                                   double tol = 1e-8);

// --- scaling & assumption estimators --------------------------------------

enum class VolumeMode { Measure, Count };
enum class ExitMode { MaxOverBall, OriginOnly };

struct ScalingOptions {
    VolumeMode volume_mode = VolumeMode::Measure;
    ExitMode exit_mode = ExitMode::MaxOverBall;
    double epsilon = 0.5;       // probe ball uses radius index max(1, ⌊ε·N⌋)
    int random_pairs = 8;       // on top of the deterministic farthest pair
    std::uint64_t seed = 0;
    int sr_multiplier = 2;      // M in the resistance-growth probe
    double tol = kDefaultTol;
};

struct ScalingLevel {
    int level = 0;              // 1-based
    int radius = 0;
    double volume = 0.0;        // 𝒱_N
    double exit_time = 0.0;     // 𝒯_N
    double ratio = 0.0;         // 𝒯_N / 𝒱_N
    double probe_min = 0.0;     // min over pairs of ratio / R_eff^{Γ_N}(y,z); NaN if no pair
    double einstein = 0.0;      // 𝒯(o,r) / (𝒱(B) R_eff(o, B^c)); NaN if B = V
    double sr_ratio = 0.0;      // R_eff(o,B(o,Mr)^c) / R_eff(o,B(o,r)^c); NaN if undefined
};

struct ScalingReport {
    std::vector<ScalingLevel> levels;
    double alpha_hat = 0.0;     // log-log slope of 𝒱_N against r_N
    double beta_hat = 0.0;      // log-log slope of 𝒯_N against r_N
    double alpha_residual = 0.0;
    double beta_residual = 0.0;
    int fit_levels_used = 0;    // trailing window the fits were taken over
};

/// Fills the exhaustion's scale tables and estimates the growth exponents.
/// Needs at least 3 levels and every ball's complement nonempty.
ScalingReport scaling_report(const WeightedGraph& g, GraphExhaustion& ex,
                             const ScalingOptions& opts = {});

// Shared helpers for the linear algebra above.
Eigen::SparseMatrix<double> graph_laplacian(const WeightedGraph& g);
Eigen::VectorXd spd_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                          double tol);

} // namespace rsep
