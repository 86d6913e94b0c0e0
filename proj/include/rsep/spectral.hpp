#pragma once

#include "rsep/boundary.hpp"
#include "rsep/bundles.hpp"
#include "rsep/graph.hpp"
#include "rsep/sep.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace rsep {

/// Minimum eigenvalue of R_eff(x,y)·A − B on {0,1}^V, where A is the
/// ν_α-quadratic form of −𝓛^EX and B that of −∇_{xy}. The moving particle
/// lemma is the statement that this is positive semidefinite. |V| ≤ 12.
/// `max_out`, when given, receives the top eigenvalue (strictly positive
/// away from the single-edge equality case).
double mpl_min_eigenvalue(const WeightedGraph& g, VertexId x, VertexId y, double alpha,
                          double* max_out = nullptr);

struct SpectralResult {
    double lambda_max = 0.0; // largest eigenvalue of t_scale·L_sym + κ·v_scale·diag(u)
    double normalized = 0.0; // λ/(κ·v_scale); 0 exactly when κ = 0
};

/// Largest eigenvalue of the (symmetrized) generator plus a diagonal
/// perturbation, in the ν-weighted inner product. For the conservative case
/// pass spec = nullptr and a constant-α measure; for the boundary-driven
/// case the generator is symmetrized against the profile measure.
SpectralResult spectral_estimate(const WeightedGraph& g, const BoundarySpec* spec,
                                 const MeasureSpec& nu, const Eigen::VectorXd& u_diag,
                                 double kappa, double t_scale, double v_scale);

/// Tabulates U^{(1)}_j(p, ·) = φ_p − Φ_p(⟨·⟩_Λ) over all 2^|V| states.
Eigen::VectorXd u_one_state_table(const WeightedGraph& g, const LocalFunctionBundle& bundle,
                                  int anchor, std::span<const int> block);

struct BoundaryLemmaReport {
    // change-of-measure supremum vs flow/energy budget
    double sup_lhs = 0.0;
    double sup_rhs = 0.0;
    bool sup_holds = false;
    // sampled-density inequalities; worst signed margins (≥ -tol passes)
    double asymm_margin = 0.0;    // ν[f(−𝓛f)] − bound
    bool asymm_holds = false;
    double exchange_margin = 0.0; // gradient change-of-measure inequality
    bool exchange_holds = false;
    double mpl_margin = 0.0;      // boundary moving-particle inequality
    bool mpl_holds = false;
    // Cor. 5.4 box
    double rho_min = 0.0;
    double rho_max = 0.0;
    double box_low = 0.0;
    double box_high = 0.0;
    bool box_holds = false;

    bool all_hold() const {
        return sup_holds && asymm_holds && exchange_holds && mpl_holds && box_holds;
    }
};

/// Exhaustive + sampled verification of the boundary-driven change-of-measure
/// estimates against the mock measure ν_λ built from the stationary marginal.
/// |V| ≤ 10 for the exhaustive supremum.
BoundaryLemmaReport verify_boundary_lemmas(const WeightedGraph& g, const BoundarySpec& spec,
                                           int samples = 256, std::uint64_t seed = 0);

} // namespace rsep
