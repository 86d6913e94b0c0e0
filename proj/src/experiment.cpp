#include "rsep/experiment.hpp"

#include "rsep/rng.hpp"
#include "rsep/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

namespace rsep {

void ExperimentConfig::validate() const {
    if (radii.empty() || radii.front() != 1)
        raise(Errc::ValidationError, "radii must start at 1");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            raise(Errc::ValidationError, "radii must be strictly increasing");
    for (int lvl : levels)
        if (lvl < 1 || lvl > static_cast<int>(radii.size()))
            raise(Errc::ValidationError, "level index outside the radii list");
    if (epsilons.empty()) raise(Errc::ValidationError, "need at least one epsilon");
    for (double e : epsilons)
        if (!(e > 0.0) || e > 1.0)
            raise(Errc::ValidationError, "epsilon must lie in (0, 1]");
    if (block_radius < 1) raise(Errc::ValidationError, "block radius must be >= 1");
    if (!(delta > 0.0)) raise(Errc::ValidationError, "delta must be positive");
    if (!(horizon > 0.0)) raise(Errc::ValidationError, "horizon must be positive");
    if (alpha < 0.0 || alpha > 1.0) raise(Errc::ValidationError, "alpha must lie in [0,1]");
    if (trajectories < 1) raise(Errc::ValidationError, "need at least one trajectory");
    if (confidence <= 0.0 || confidence >= 1.0)
        raise(Errc::ValidationError, "confidence must lie in (0,1)");
    if (initial != "product" && initial != "nu-lambda" && initial != "full" &&
        initial != "empty")
        raise(Errc::ValidationError, "initial must be product|nu-lambda|full|empty");
    if (g_poly.empty()) raise(Errc::ValidationError, "G polynomial needs coefficients");
}

namespace {

double normal_quantile(double p) {
    // Acklam's rational approximation; |error| < 1.2e-9, ample for intervals.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p <= 1 - plow) {
        double q = p - 0.5;
        double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    double q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

double binomial_cdf(int x, int n, double p) {
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return x >= n ? 1.0 : 0.0;
    double total = 0.0;
    double logp = std::log(p), logq = std::log1p(-p);
    double logc = 0.0; // log C(n,0)
    for (int k = 0; k <= x; ++k) {
        total += std::exp(logc + k * logp + (n - k) * logq);
        logc += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1));
    }
    return std::min(total, 1.0);
}

} // namespace

Interval wilson_interval(int successes, int trials, double confidence) {
    double z = normal_quantile(0.5 + confidence / 2.0);
    double n = trials;
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = p + z2 / (2 * n);
    double spread = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, (center - spread) / denom), std::min(1.0, (center + spread) / denom)};
}

double clopper_pearson_upper(int successes, int trials, double confidence) {
    if (successes >= trials) return 1.0;
    double alpha = 1.0 - confidence;
    if (successes == 0) return 1.0 - std::pow(alpha, 1.0 / trials);
    double lo = static_cast<double>(successes) / trials, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (binomial_cdf(successes, trials, mid) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

namespace {

// Exact ∫ U_{N,ε}(p, η_t) dt for one probe cell; count-indexed lookup makes
// the per-event cost O(1) plus an O(deg) bundle refresh when the dependency
// ball is touched.
class UCell : public Observer {
public:
    UCell(const WeightedGraph& g, const LocalFunctionBundle& bundle, int anchor,
          std::vector<int> block, std::vector<int> ball)
        : g_(&g), bundle_(bundle), anchor_(anchor), block_(std::move(block)),
          ball_(std::move(ball)) {
        GlobalAverage phi(g, bundle, anchor);
        phi_table_.resize(ball_.size() + 1);
        for (std::size_t j = 0; j <= ball_.size(); ++j)
            phi_table_[j] = phi(static_cast<double>(j) / static_cast<double>(ball_.size()));
        in_ball_.assign(static_cast<std::size_t>(g.num_vertices()), 0);
        for (int v : ball_) in_ball_[static_cast<std::size_t>(v)] = 1;
        in_dep_.assign(static_cast<std::size_t>(g.num_vertices()), 0);
        for (int v : dependency_ball(g, bundle, anchor))
            in_dep_[static_cast<std::size_t>(v)] = 1;
    }

    void begin(const Configuration& eta) override {
        integral_ = 0.0;
        last_t_ = 0.0;
        ball_count_ = 0;
        for (int v : ball_)
            if (eta.at(v)) ++ball_count_;
        phi_now_ = bundle_.eval(*g_, anchor_, eta);
    }

    void on_event(double t, const Event& e, const Configuration& eta) override {
        integral_ += current_u() * (t - last_t_);
        last_t_ = t;
        bool dirty = false;
        auto touch = [&](int v) {
            if (in_ball_[static_cast<std::size_t>(v)]) ball_count_ += eta.at(v) ? 1 : -1;
            if (in_dep_[static_cast<std::size_t>(v)]) dirty = true;
        };
        touch(e.x);
        if (e.kind == Transition::Kind::Swap) touch(e.y);
        if (dirty) phi_now_ = bundle_.eval(*g_, anchor_, eta);
    }

    void finish(double horizon, const Configuration&) override {
        integral_ += current_u() * (horizon - last_t_);
        last_t_ = horizon;
    }

    double integral() const { return integral_; }

private:
    double current_u() const {
        return phi_now_ - phi_table_[static_cast<std::size_t>(ball_count_)];
    }

    const WeightedGraph* g_;
    LocalFunctionBundle bundle_;
    int anchor_;
    std::vector<int> block_;
    std::vector<int> ball_;
    std::vector<double> phi_table_;
    std::vector<char> in_ball_;
    std::vector<char> in_dep_;
    double integral_ = 0.0;
    double last_t_ = 0.0;
    double phi_now_ = 0.0;
    int ball_count_ = 0;
};

// ∫ G(t)(η_t(a) − ρ̄_a) dt with a polynomial G, integrated segment-exactly
// through the antiderivative.
class BoundaryStat : public Observer {
public:
    BoundaryStat(int vertex, double target, std::vector<double> g_poly)
        : vertex_(vertex), target_(target) {
        anti_.push_back(0.0);
        for (std::size_t k = 0; k < g_poly.size(); ++k)
            anti_.push_back(g_poly[k] / static_cast<double>(k + 1));
    }

    void begin(const Configuration& eta) override {
        integral_ = 0.0;
        last_t_ = 0.0;
        cur_ = eta.at(vertex_) ? 1.0 : 0.0;
    }

    void on_event(double t, const Event& e, const Configuration& eta) override {
        integral_ += (cur_ - target_) * (anti(t) - anti(last_t_));
        last_t_ = t;
        (void)e;
        cur_ = eta.at(vertex_) ? 1.0 : 0.0;
    }

    void finish(double horizon, const Configuration&) override {
        integral_ += (cur_ - target_) * (anti(horizon) - anti(last_t_));
        last_t_ = horizon;
    }

    double integral() const { return integral_; }

private:
    double anti(double t) const {
        double acc = 0.0;
        for (std::size_t k = anti_.size(); k-- > 0;) acc = acc * t + anti_[k];
        return acc;
    }

    int vertex_;
    double target_;
    std::vector<double> anti_;
    double integral_ = 0.0;
    double last_t_ = 0.0;
    double cur_ = 0.0;
};

// Probe points: the origin, a deepest-interior vertex, and a near-boundary
// vertex of the level ball (deduplicated, deterministic).
std::vector<VertexId> select_probes(const WeightedGraph& mother,
                                    const WeightedGraph& level_graph,
                                    std::span<const int> ball, VertexId origin) {
    std::set<int> in_ball(ball.begin(), ball.end());
    std::vector<int> ring; // ball vertices adjacent to the complement
    for (int v : ball)
        for (auto [w, c] : mother.neighbors(v))
            if (!in_ball.count(w)) {
                ring.push_back(v);
                break;
            }
    std::vector<VertexId> probes{origin};
    if (!ring.empty()) {
        // multi-source BFS depth inside the level graph
        std::vector<int> depth(static_cast<std::size_t>(level_graph.num_vertices()), -1);
        std::vector<int> queue;
        for (int v : ring) {
            int lv = level_graph.index_of(mother.id_of(v));
            depth[static_cast<std::size_t>(lv)] = 0;
            queue.push_back(lv);
        }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int x = queue[head];
            for (auto [y, c] : level_graph.neighbors(x))
                if (depth[static_cast<std::size_t>(y)] < 0) {
                    depth[static_cast<std::size_t>(y)] = depth[static_cast<std::size_t>(x)] + 1;
                    queue.push_back(y);
                }
        }
        int deepest = 0;
        for (int i = 1; i < level_graph.num_vertices(); ++i)
            if (depth[static_cast<std::size_t>(i)] > depth[static_cast<std::size_t>(deepest)])
                deepest = i;
        probes.push_back(level_graph.id_of(deepest));
        int near = *std::min_element(ring.begin(), ring.end());
        probes.push_back(mother.id_of(near));
    }
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    return probes;
}

} // namespace

ExperimentReport run_experiment(const WeightedGraph& g, const BoundarySpec* spec,
                                VertexId origin, const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.boundary_driven && spec == nullptr)
        raise(Errc::ValidationError, "boundary-driven experiment needs a boundary spec");

    auto ex = exhaust(g, origin, cfg.radii);

    // Fill the scale tables directly; the scaling_report extras (probe
    // pairs, recurrence diagnostics) are not needed here and levels whose
    // ball covers the whole graph are simply not usable.
    std::vector<char> level_usable(static_cast<std::size_t>(ex.num_levels()), 0);
    ex.mass_scale.assign(static_cast<std::size_t>(ex.num_levels()), 0.0);
    ex.time_scale.assign(static_cast<std::size_t>(ex.num_levels()), 0.0);
    for (int lvl = 1; lvl <= ex.num_levels(); ++lvl) {
        const auto& ball = ex.ball_sets[static_cast<std::size_t>(lvl - 1)];
        if (static_cast<int>(ball.size()) >= g.num_vertices()) continue;
        auto texit = exit_times(g, ball);
        double t_n;
        if (cfg.exit_mode == ExitMode::MaxOverBall) {
            t_n = texit.maxCoeff();
        } else {
            auto it = std::find(ball.begin(), ball.end(), g.index_of(origin));
            t_n = texit[static_cast<int>(std::distance(ball.begin(), it))];
        }
        ex.time_scale[static_cast<std::size_t>(lvl - 1)] = t_n;
        ex.mass_scale[static_cast<std::size_t>(lvl - 1)] =
            cfg.volume_mode == VolumeMode::Measure ? g.volume(ball)
                                                   : static_cast<double>(ball.size());
        level_usable[static_cast<std::size_t>(lvl - 1)] = 1;
    }

    std::vector<int> levels = cfg.levels;
    const bool auto_levels = levels.empty();
    if (auto_levels) {
        // keep levels where every (ε, origin-probe) geometry fits
        for (int lvl = 1; lvl <= ex.num_levels(); ++lvl) {
            if (!level_usable[static_cast<std::size_t>(lvl - 1)]) continue;
            const auto& level_graph = ex.levels[static_cast<std::size_t>(lvl - 1)];
            bool fits = true;
            for (double eps : cfg.epsilons) {
                int idx = std::min(lvl, std::max(1, static_cast<int>(std::floor(eps * lvl))));
                int pradius = cfg.radii[static_cast<std::size_t>(idx - 1)];
                if (level_graph.ball(origin, cfg.block_radius).size() >=
                    level_graph.ball(origin, pradius).size())
                    fits = false;
            }
            if (fits) levels.push_back(lvl);
        }
        if (levels.empty())
            raise(Errc::ValidationError,
                  "no exhaustion level admits the requested block/probe geometry");
    } else {
        for (int lvl : levels)
            if (!level_usable[static_cast<std::size_t>(lvl - 1)])
                raise(Errc::ComplementEmpty,
                      "level " + std::to_string(lvl) + " covers the whole graph");
    }

    auto bundle = make_bundle(cfg.bundle);
    if (bundle.kind != LocalFunctionBundle::Kind::Vertex)
        raise(Errc::ValidationError, "experiment probes are vertices; use a vertex bundle");

    ExperimentReport report;
    report.seed = cfg.seed;
    report.levels = levels;

    int n_threads = cfg.threads > 0 ? cfg.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;

    for (int lvl : levels) {
        const auto& level_graph = ex.levels[static_cast<std::size_t>(lvl - 1)];
        const auto& ball_set = ex.ball_sets[static_cast<std::size_t>(lvl - 1)];
        double t_scale = ex.time_scale[static_cast<std::size_t>(lvl - 1)];
        double v_scale = ex.mass_scale[static_cast<std::size_t>(lvl - 1)];
        report.mass_scale.push_back(v_scale);
        report.time_scale.push_back(t_scale);

        std::vector<VertexId> probes;
        if (cfg.probe_all)
            probes = level_graph.vertex_ids();
        else
            probes = select_probes(g, level_graph, ball_set, origin);

        // Geometry per (ε, probe): the probe ball B(p, r_{⌊εN⌋}) and block
        // Λ_j(p), both inside the level graph.
        struct CellGeom {
            double epsilon;
            VertexId probe;
            int probe_radius;
            std::vector<int> block;
            std::vector<int> ball;
        };
        std::vector<CellGeom> geoms;
        for (double eps : cfg.epsilons) {
            int idx = std::max(1, static_cast<int>(std::floor(eps * lvl)));
            idx = std::min(idx, lvl);
            int pradius = cfg.radii[static_cast<std::size_t>(idx - 1)];
            bool any_fit = false;
            for (VertexId p : probes) {
                CellGeom geom;
                geom.epsilon = eps;
                geom.probe = p;
                geom.probe_radius = pradius;
                geom.block = level_graph.ball(p, cfg.block_radius);
                geom.ball = level_graph.ball(p, pradius);
                // the block must sit strictly inside the averaging ball;
                // probes too close to the level edge are skipped
                if (geom.block.size() >= geom.ball.size()) continue;
                any_fit = true;
                geoms.push_back(std::move(geom));
            }
            if (!any_fit)
                raise(Errc::ValidationError,
                      "no probe admits a block B(p," + std::to_string(cfg.block_radius) +
                          ") strictly inside B(p," + std::to_string(pradius) +
                          ") at level " + std::to_string(lvl));
        }

        // Per-level boundary spec: reservoirs that fall inside the ball.
        BoundarySpec level_spec;
        const BoundarySpec* run_spec = nullptr;
        std::optional<MeasureSpec> nu_lambda;
        if (cfg.boundary_driven) {
            for (std::size_t i = 0; i < spec->size(); ++i)
                if (level_graph.contains(spec->vertices[i])) {
                    level_spec.vertices.push_back(spec->vertices[i]);
                    level_spec.lambda_plus.push_back(spec->lambda_plus[i]);
                    level_spec.lambda_minus.push_back(spec->lambda_minus[i]);
                }
            if (level_spec.vertices.empty())
                raise(Errc::ValidationError,
                      "no reservoir lies inside level " + std::to_string(lvl));
            level_spec.validate(level_graph);
            run_spec = &level_spec;
            if (cfg.initial == "nu-lambda")
                nu_lambda =
                    MeasureSpec::product_profile(stationary_marginal(level_graph, level_spec).rho);
        } else if (cfg.initial == "nu-lambda") {
            raise(Errc::ValidationError, "nu-lambda initial state needs boundary-driven mode");
        }

        const int m_traj = cfg.trajectories;
        const auto n_cells = geoms.size();
        const auto n_bstats = run_spec != nullptr ? run_spec->size() : 0;
        std::vector<char> exceed(static_cast<std::size_t>(m_traj) * n_cells, 0);
        std::vector<double> bvals(static_cast<std::size_t>(m_traj) * n_bstats, 0.0);

        auto worker = [&](int traj_lo, int traj_hi) {
            for (int m = traj_lo; m < traj_hi; ++m) {
                PhiloxRng init_rng(derive_seed(cfg.seed, "initial-state"),
                                   static_cast<std::uint64_t>(m) |
                                       (static_cast<std::uint64_t>(lvl) << 40));
                Configuration eta0(level_graph.num_vertices());
                if (cfg.initial == "product")
                    eta0 = sample_product(MeasureSpec::product(cfg.alpha),
                                          level_graph.num_vertices(), init_rng);
                else if (cfg.initial == "nu-lambda")
                    eta0 = sample_product(*nu_lambda, level_graph.num_vertices(), init_rng);
                else if (cfg.initial == "full")
                    for (int i = 0; i < level_graph.num_vertices(); ++i) eta0.set(i, true);

                std::vector<UCell> cells;
                cells.reserve(n_cells);
                for (const auto& geom : geoms)
                    cells.emplace_back(level_graph, bundle,
                                       level_graph.index_of(geom.probe), geom.block,
                                       geom.ball);
                std::vector<BoundaryStat> bstats;
                if (run_spec != nullptr)
                    for (std::size_t i = 0; i < run_spec->size(); ++i)
                        bstats.emplace_back(level_graph.index_of(run_spec->vertices[i]),
                                            run_spec->target_density(i), cfg.g_poly);
                std::vector<Observer*> observers;
                for (auto& c : cells) observers.push_back(&c);
                for (auto& b : bstats) observers.push_back(&b);

                SimulateOptions sim;
                sim.time_scale = t_scale;
                sim.horizon = cfg.horizon;
                sim.seed = derive_seed(cfg.seed, "trajectory");
                sim.stream = static_cast<std::uint64_t>(m) |
                             (static_cast<std::uint64_t>(lvl) << 40);
                sim.record_events = false;
                simulate(level_graph, run_spec, eta0, sim, observers);

                for (std::size_t c = 0; c < n_cells; ++c)
                    exceed[static_cast<std::size_t>(m) * n_cells + c] =
                        std::abs(cells[c].integral()) > cfg.delta ? 1 : 0;
                for (std::size_t b = 0; b < n_bstats; ++b)
                    bvals[static_cast<std::size_t>(m) * n_bstats + b] = bstats[b].integral();
            }
        };

        if (n_threads == 1 || m_traj < 2 * n_threads) {
            worker(0, m_traj);
        } else {
            std::vector<std::thread> pool;
            int chunk = (m_traj + n_threads - 1) / n_threads;
            for (int t = 0; t < n_threads; ++t) {
                int lo = t * chunk;
                int hi = std::min(m_traj, lo + chunk);
                if (lo < hi) pool.emplace_back(worker, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        // deterministic reduction in (cell, trajectory) order
        ExceedanceCell const* sup_of_eps = nullptr;
        std::vector<ExceedanceCell> level_cells;
        for (std::size_t c = 0; c < n_cells; ++c) {
            ExceedanceCell cell;
            cell.level = lvl;
            cell.epsilon = geoms[c].epsilon;
            cell.probe = geoms[c].probe;
            cell.probe_ball_radius = geoms[c].probe_radius;
            cell.trials = m_traj;
            for (int m = 0; m < m_traj; ++m)
                cell.exceed += exceed[static_cast<std::size_t>(m) * n_cells + c];
            cell.p_hat = static_cast<double>(cell.exceed) / m_traj;
            auto wil = wilson_interval(cell.exceed, m_traj, cfg.confidence);
            cell.wilson_low = wil.low;
            cell.wilson_high = wil.high;
            cell.cp_upper = clopper_pearson_upper(cell.exceed, m_traj, cfg.confidence);
            double p_for_log = cell.exceed > 0 ? cell.p_hat : cell.cp_upper;
            cell.decay_stat = -std::log(p_for_log) / v_scale;
            level_cells.push_back(cell);
        }
        report.cells.insert(report.cells.end(), level_cells.begin(), level_cells.end());
        for (double eps : cfg.epsilons) {
            sup_of_eps = nullptr;
            for (const auto& cell : level_cells)
                if (cell.epsilon == eps &&
                    (sup_of_eps == nullptr || cell.p_hat > sup_of_eps->p_hat))
                    sup_of_eps = &cell;
            if (sup_of_eps != nullptr) report.sup_cells.push_back(*sup_of_eps);
        }

        for (std::size_t b = 0; b < n_bstats; ++b) {
            BoundaryCell bc;
            bc.level = lvl;
            bc.vertex = run_spec->vertices[b];
            bc.target = run_spec->target_density(b);
            double sum = 0.0, sumsq = 0.0;
            for (int m = 0; m < m_traj; ++m) {
                double v = bvals[static_cast<std::size_t>(m) * n_bstats + b];
                sum += v;
                sumsq += v * v;
            }
            bc.mean = sum / m_traj;
            double var = std::max(0.0, sumsq / m_traj - bc.mean * bc.mean);
            bc.std_error = std::sqrt(var / m_traj);
            report.boundary.push_back(bc);
        }
    }
    return report;
}

} // namespace rsep
