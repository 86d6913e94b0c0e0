#pragma once

#include "rsep/boundary.hpp"
#include "rsep/bundles.hpp"
#include "rsep/graph.hpp"
#include "rsep/potential.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsep {

/// Monte Carlo local-ergodicity experiment: per exhaustion level N, run the
/// (boundary-driven) exclusion process sped up by 𝒯_N and estimate
/// ℙ[|∫_0^T U_{N,ε}(p, η_t) dt| > δ] over the probe set.
struct ExperimentConfig {
    std::vector<int> radii{1, 3, 4, 8}; // exhaustion radii, r_1 = 1
    std::vector<int> levels;            // 1-based indices to run; empty = every
                                        // level whose probe geometry fits
    std::vector<double> epsilons{0.5};
    int block_radius = 2;            // j: Λ_j(p) = B(p, j)
    std::string bundle = "occupancy";
    double delta = 0.1;
    double horizon = 1.0;            // T
    double alpha = 0.5;              // conservative initial/reference density
    bool boundary_driven = false;    // use the graph document's boundary spec
    std::string initial = "product"; // product | nu-lambda | full | empty
    int trajectories = 1000;         // M
    std::uint64_t seed = 0;
    std::vector<double> g_poly{1.0}; // G(t) polynomial coefficients, low order first
    int threads = 0;                 // 0 = hardware concurrency
    bool probe_all = false;          // sup over every vertex instead of the probe trio
    double confidence = 0.95;
    VolumeMode volume_mode = VolumeMode::Measure;
    ExitMode exit_mode = ExitMode::MaxOverBall;

    void validate() const; // ranges only; graph-dependent checks happen at run time
};

struct ExceedanceCell {
    int level = 0;
    double epsilon = 0.0;
    VertexId probe = 0;
    int probe_ball_radius = 0;
    int exceed = 0;
    int trials = 0;
    double p_hat = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    double cp_upper = 0.0;  // one-sided Clopper–Pearson bound; the estimate when exceed = 0
    double decay_stat = 0.0; // −log(max(p̂, cp_upper 1{exceed=0})) / 𝒱_N
};

struct BoundaryCell {
    int level = 0;
    VertexId vertex = 0;
    double target = 0.0; // λ+/(λ+ + λ−)
    double mean = 0.0;   // mean of ∫ G(t)(η_t(a) − target) dt
    double std_error = 0.0;
};

struct ExperimentReport {
    std::vector<ExceedanceCell> cells;     // per (level, ε, probe)
    std::vector<ExceedanceCell> sup_cells; // per (level, ε): the worst probe
    std::vector<BoundaryCell> boundary;    // boundary statistic per reservoir in range
    std::vector<int> levels;
    std::vector<double> mass_scale;        // 𝒱_N per reported level
    std::vector<double> time_scale;        // 𝒯_N per reported level
    std::uint64_t seed = 0;
};

ExperimentReport run_experiment(const WeightedGraph& g, const BoundarySpec* spec,
                                VertexId origin, const ExperimentConfig& cfg);

// Interval helpers (exposed for the report tests).
struct Interval {
    double low;
    double high;
};
Interval wilson_interval(int successes, int trials, double confidence);
/// Smallest p with P[Bin(n,p) ≤ x] ≤ 1 − confidence.
double clopper_pearson_upper(int successes, int trials, double confidence);

} // namespace rsep
