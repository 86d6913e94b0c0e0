#include "rsep/potential.hpp"

#include "rsep/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rsep {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> complement_of(const WeightedGraph& g, std::span<const int> set) {
    std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
    for (int i : set) in[static_cast<std::size_t>(i)] = 1;
    std::vector<int> out;
    for (int i = 0; i < g.num_vertices(); ++i)
        if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

// Laplacian restricted to `rows` (principal submatrix); SPD whenever the
// complement is nonempty on a connected graph.
Eigen::SparseMatrix<double> restricted_laplacian(const WeightedGraph& g,
                                                 std::span<const int> rows,
                                                 const std::vector<int>& local) {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        int x = rows[r];
        trip.emplace_back(static_cast<int>(r), static_cast<int>(r), g.weight(x));
        for (auto [y, c] : g.neighbors(x)) {
            int ly = local[static_cast<std::size_t>(y)];
            if (ly >= 0) trip.emplace_back(static_cast<int>(r), ly, -c);
        }
    }
    Eigen::SparseMatrix<double> m(static_cast<int>(rows.size()), static_cast<int>(rows.size()));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

std::vector<int> local_index(const WeightedGraph& g, std::span<const int> set) {
    std::vector<int> local(static_cast<std::size_t>(g.num_vertices()), -1);
    for (std::size_t r = 0; r < set.size(); ++r) local[static_cast<std::size_t>(set[r])] = static_cast<int>(r);
    return local;
}

double linear_fit(std::span<const double> xs, std::span<const double> ys, double* rms) {
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    if (rms != nullptr) {
        double ss = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double e = ys[i] - (intercept + slope * xs[i]);
            ss += e * e;
        }
        *rms = std::sqrt(ss / n);
    }
    return slope;
}

} // namespace

Eigen::SparseMatrix<double> graph_laplacian(const WeightedGraph& g) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(g.num_vertices() + 2 * g.num_edges()));
    for (int x = 0; x < g.num_vertices(); ++x) trip.emplace_back(x, x, g.weight(x));
    for (const auto& e : g.edges()) {
        trip.emplace_back(e.u, e.v, -e.c);
        trip.emplace_back(e.v, e.u, -e.c);
    }
    Eigen::SparseMatrix<double> m(g.num_vertices(), g.num_vertices());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

Eigen::VectorXd spd_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                          double tol) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(a);
    if (solver.info() != Eigen::Success)
        raise(Errc::Internal, "sparse factorization failed (singular system?)");
    Eigen::VectorXd x = solver.solve(b);
    // Iterative refinement until the relative residual clears `tol`.
    double scale = b.cwiseAbs().maxCoeff() + 1e-300;
    for (int pass = 0; pass < 3; ++pass) {
        Eigen::VectorXd r = b - a * x;
        if (r.cwiseAbs().maxCoeff() <= tol * scale) return x;
        x += solver.solve(r);
    }
    Eigen::VectorXd r = b - a * x;
    if (r.cwiseAbs().maxCoeff() > tol * scale)
        raise(Errc::Internal, "iterative refinement did not reach the requested residual");
    return x;
}

double dirichlet_energy(const WeightedGraph& g, std::span<const double> f) {
    if (static_cast<int>(f.size()) != g.num_vertices())
        raise(Errc::MissingValue, "function must assign a value to every vertex");
    double e = 0.0;
    for (const auto& edge : g.edges()) {
        double d = f[static_cast<std::size_t>(edge.u)] - f[static_cast<std::size_t>(edge.v)];
        e += edge.c * d * d;
    }
    return e;
}

HarmonicField solve_harmonic(const WeightedGraph& g, std::span<const int> boundary,
                             std::span<const double> values, double tol) {
    if (boundary.empty()) raise(Errc::EmptyBoundary, "harmonic solve needs boundary vertices");
    if (boundary.size() != values.size())
        raise(Errc::MissingValue, "each boundary vertex needs a value");

    HarmonicField out;
    out.boundary.assign(boundary.begin(), boundary.end());
    out.boundary_values.assign(values.begin(), values.end());
    out.values.assign(static_cast<std::size_t>(g.num_vertices()), 0.0);

    std::vector<char> is_boundary(static_cast<std::size_t>(g.num_vertices()), 0);
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        int b = boundary[i];
        if (b < 0 || b >= g.num_vertices()) raise(Errc::UnknownVertex, "boundary index out of range");
        is_boundary[static_cast<std::size_t>(b)] = 1;
        out.values[static_cast<std::size_t>(b)] = values[i];
    }

    std::vector<int> interior;
    for (int i = 0; i < g.num_vertices(); ++i)
        if (!is_boundary[static_cast<std::size_t>(i)]) interior.push_back(i);

    if (!interior.empty()) {
        auto local = local_index(g, interior);
        auto lii = restricted_laplacian(g, interior, local);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(interior.size()));
        for (std::size_t r = 0; r < interior.size(); ++r)
            for (auto [y, c] : g.neighbors(interior[r]))
                if (is_boundary[static_cast<std::size_t>(y)])
                    rhs[static_cast<int>(r)] += c * out.values[static_cast<std::size_t>(y)];
        Eigen::VectorXd h = spd_solve(lii, rhs, tol);
        for (std::size_t r = 0; r < interior.size(); ++r)
            out.values[static_cast<std::size_t>(interior[r])] = h[static_cast<int>(r)];
    }

    double res = 0.0;
    for (int x : interior) {
        double lap = 0.0;
        for (auto [y, c] : g.neighbors(x))
            lap += c * (out.values[static_cast<std::size_t>(y)] -
                        out.values[static_cast<std::size_t>(x)]);
        res = std::max(res, std::abs(lap));
    }
    out.residual = res;

    // Discrete maximum principle; a violation means the solve went wrong.
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    double slack = 1e-9 * (std::abs(lo) + std::abs(hi) + 1.0);
    for (double v : out.values)
        if (v < lo - slack || v > hi + slack)
            raise(Errc::Internal, "maximum principle violated in harmonic solve");
    return out;
}

double effective_resistance(const WeightedGraph& g, std::span<const int> a1,
                            std::span<const int> a2, double tol) {
    if (a1.empty() || a2.empty()) raise(Errc::EmptySet, "resistance needs nonempty sets");
    std::set<int> s1(a1.begin(), a1.end());
    for (int i : a2)
        if (s1.count(i))
            raise(Errc::OverlappingSets, "resistance sets share vertex " +
                                             std::to_string(g.id_of(i)));
    std::vector<int> boundary(a1.begin(), a1.end());
    boundary.insert(boundary.end(), a2.begin(), a2.end());
    std::vector<double> values(a1.size(), 1.0);
    values.insert(values.end(), a2.size(), 0.0);
    auto h = solve_harmonic(g, boundary, values, tol);
    double energy = dirichlet_energy(g, h.values);
    if (!(energy > 0.0)) raise(Errc::Internal, "unit potential with zero Dirichlet energy");
    return 1.0 / energy;
}

double effective_resistance(const WeightedGraph& g, VertexId x, VertexId y, double tol) {
    int ix = g.index_of(x);
    int iy = g.index_of(y);
    std::array<int, 1> a1{ix};
    std::array<int, 1> a2{iy};
    return effective_resistance(g, a1, a2, tol);
}

Eigen::MatrixXd green_function(const WeightedGraph& g, std::span<const int> a_set) {
    if (a_set.empty()) raise(Errc::EmptySet, "Green's function needs a nonempty set");
    if (static_cast<int>(a_set.size()) >= g.num_vertices())
        raise(Errc::ComplementEmpty, "Green's function needs A to be a proper subset");
    auto local = local_index(g, a_set);
    const int m = static_cast<int>(a_set.size());
    Eigen::MatrixXd killed = Eigen::MatrixXd::Identity(m, m);
    for (int r = 0; r < m; ++r) {
        int x = a_set[static_cast<std::size_t>(r)];
        for (auto [y, c] : g.neighbors(x)) {
            int ly = local[static_cast<std::size_t>(y)];
            if (ly >= 0) killed(r, ly) -= c / g.weight(x);
        }
    }
    return killed.partialPivLu().inverse();
}

Eigen::VectorXd exit_times(const WeightedGraph& g, std::span<const int> a_set, double tol) {
    if (a_set.empty()) raise(Errc::EmptySet, "exit time needs a nonempty set");
    if (static_cast<int>(a_set.size()) >= g.num_vertices())
        raise(Errc::ComplementEmpty, "exit times need a nonempty complement");
    auto local = local_index(g, a_set);
    auto laa = restricted_laplacian(g, a_set, local);
    Eigen::VectorXd rhs(static_cast<int>(a_set.size()));
    for (std::size_t r = 0; r < a_set.size(); ++r)
        rhs[static_cast<int>(r)] = g.weight(a_set[r]);
    return spd_solve(laa, rhs, tol);
}

double mean_exit_time(const WeightedGraph& g, VertexId x, std::span<const int> a_set,
                      double tol) {
    int ix = g.index_of(x);
    auto it = std::find(a_set.begin(), a_set.end(), ix);
    if (it == a_set.end()) return 0.0; // already outside
    auto t = exit_times(g, a_set, tol);
    return t[static_cast<int>(std::distance(a_set.begin(), it))];
}

double hitting_time(const WeightedGraph& g, VertexId x, std::span<const int> target,
                    double tol) {
    if (target.empty()) raise(Errc::EmptySet, "hitting time needs a nonempty target");
    int ix = g.index_of(x);
    if (std::find(target.begin(), target.end(), ix) != target.end()) return 0.0;
    auto rest = complement_of(g, target);
    return mean_exit_time(g, x, rest, tol);
}

CommuteTime commute_time(const WeightedGraph& g, VertexId y, VertexId z, double tol) {
    if (y == z) raise(Errc::SameVertex, "commute time needs two distinct vertices");
    std::array<int, 1> ty{g.index_of(z)};
    std::array<int, 1> tz{g.index_of(y)};
    CommuteTime out;
    out.hitting_sum = hitting_time(g, y, ty, tol) + hitting_time(g, z, tz, tol);
    out.identity = g.total_volume() * effective_resistance(g, y, z, tol);
    return out;
}

double flow(const WeightedGraph& g, std::span<const double> h, VertexId a) {
    if (static_cast<int>(h.size()) != g.num_vertices())
        raise(Errc::MissingValue, "potential must assign a value to every vertex");
    int ia = g.index_of(a);
    double i_h = 0.0;
    for (auto [y, c] : g.neighbors(ia))
        i_h += c * (h[static_cast<std::size_t>(y)] - h[static_cast<std::size_t>(ia)]);
    return i_h;
}

Eigen::MatrixXd TraceNetwork::kernel() const {
    Eigen::MatrixXd p = chat;
    for (int a = 0; a < p.rows(); ++a) p.row(a) /= c_boundary[static_cast<std::size_t>(a)];
    return p;
}

double TraceNetwork::trace_energy(std::span<const double> boundary_values) const {
    if (boundary_values.size() != boundary.size())
        raise(Errc::MissingValue, "trace energy needs one value per boundary vertex");
    double e = 0.0;
    for (std::size_t a = 0; a < boundary.size(); ++a)
        for (std::size_t b = 0; b < boundary.size(); ++b) {
            double d = boundary_values[a] - boundary_values[b];
            e += 0.5 * chat(static_cast<int>(a), static_cast<int>(b)) * d * d;
        }
    return e;
}

std::vector<double> TraceNetwork::harmonic_extension(
    std::span<const double> boundary_values) const {
    if (boundary_values.size() != boundary.size())
        raise(Errc::MissingValue, "extension needs one value per boundary vertex");
    std::vector<double> h(static_cast<std::size_t>(harmonic_basis.rows()), 0.0);
    for (std::size_t b = 0; b < boundary.size(); ++b)
        for (int x = 0; x < harmonic_basis.rows(); ++x)
            h[static_cast<std::size_t>(x)] +=
                boundary_values[b] * harmonic_basis(x, static_cast<int>(b));
    return h;
}

TraceNetwork trace_network(const WeightedGraph& g, std::span<const int> boundary, double tol) {
    if (boundary.empty()) raise(Errc::EmptyBoundary, "trace needs boundary vertices");
    if (static_cast<int>(boundary.size()) >= g.num_vertices())
        raise(Errc::ComplementEmpty, "trace needs interior vertices");

    TraceNetwork tn;
    tn.boundary.assign(boundary.begin(), boundary.end());
    std::sort(tn.boundary.begin(), tn.boundary.end());

    std::vector<char> is_boundary(static_cast<std::size_t>(g.num_vertices()), 0);
    for (int b : tn.boundary) is_boundary[static_cast<std::size_t>(b)] = 1;
    for (const auto& e : g.edges())
        if (is_boundary[static_cast<std::size_t>(e.u)] &&
            is_boundary[static_cast<std::size_t>(e.v)])
            raise(Errc::BoundaryEdgePresent,
                  "edge inside the boundary set: (" + std::to_string(g.id_of(e.u)) + "," +
                      std::to_string(g.id_of(e.v)) + ")");

    std::vector<int> interior = complement_of(g, tn.boundary);
    auto local = local_index(g, interior);
    auto lii = restricted_laplacian(g, interior, local);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lii);
    if (solver.info() != Eigen::Success) raise(Errc::Internal, "trace factorization failed");

    const int nb = static_cast<int>(tn.boundary.size());
    tn.harmonic_basis = Eigen::MatrixXd::Zero(g.num_vertices(), nb);
    tn.chat = Eigen::MatrixXd::Zero(nb, nb);
    tn.c_boundary.resize(static_cast<std::size_t>(nb));

    for (int b = 0; b < nb; ++b) {
        int bv = tn.boundary[static_cast<std::size_t>(b)];
        tn.c_boundary[static_cast<std::size_t>(b)] = g.weight(bv);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(interior.size()));
        for (auto [y, c] : g.neighbors(bv)) {
            int ly = local[static_cast<std::size_t>(y)];
            if (ly >= 0) rhs[ly] += c;
        }
        Eigen::VectorXd h = solver.solve(rhs);
        Eigen::VectorXd r = rhs - lii * h;
        double scale = rhs.cwiseAbs().maxCoeff() + 1e-300;
        if (r.cwiseAbs().maxCoeff() > tol * scale) h += solver.solve(r);

        tn.harmonic_basis(bv, b) = 1.0;
        for (std::size_t i = 0; i < interior.size(); ++i)
            tn.harmonic_basis(interior[i], b) = h[static_cast<int>(i)];
    }

    for (int a = 0; a < nb; ++a) {
        int av = tn.boundary[static_cast<std::size_t>(a)];
        for (int b = 0; b < nb; ++b) {
            double sum = 0.0;
            for (auto [y, c] : g.neighbors(av)) sum += c * tn.harmonic_basis(y, b);
            if (!(sum > 0.0))
                raise(Errc::Internal, "trace conductance must be positive");
            tn.chat(a, b) = sum;
        }
    }
    return tn;
}

DensityProfile stationary_marginal(const WeightedGraph& g, const BoundarySpec& spec,
                                   double tol) {
    spec.validate(g);
    const int n = g.num_vertices();

    std::vector<int> bidx(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) bidx[i] = g.index_of(spec.vertices[i]);

    // Route one: the Robin system. K = L + diag(λ_+ + λ_-) on the boundary,
    // right-hand side λ_+ there.
    Eigen::SparseMatrix<double> k = graph_laplacian(g);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    {
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t i = 0; i < spec.size(); ++i)
            trip.emplace_back(bidx[i], bidx[i], spec.lambda_plus[i] + spec.lambda_minus[i]);
        Eigen::SparseMatrix<double> d(n, n);
        d.setFromTriplets(trip.begin(), trip.end());
        k += d;
        for (std::size_t i = 0; i < spec.size(); ++i) rhs[bidx[i]] = spec.lambda_plus[i];
    }
    Eigen::VectorXd rho = spd_solve(k, rhs, kDefaultTol);

    // Route two: Dirichlet-to-Neumann. Solve the |∂V| system
    //   ρ(a)[c_a + λ_+ + λ_-] − Σ_b ĉ_{a,b} ρ(b) = λ_+(a)
    // and extend harmonically.
    auto tn = trace_network(g, bidx, kDefaultTol);
    const int nb = static_cast<int>(tn.boundary.size());
    Eigen::MatrixXd m = -tn.chat;
    Eigen::VectorXd small_rhs(nb);
    for (int a = 0; a < nb; ++a) {
        int bv = tn.boundary[static_cast<std::size_t>(a)];
        auto pos = std::distance(bidx.begin(), std::find(bidx.begin(), bidx.end(), bv));
        m(a, a) += g.weight(bv) + spec.lambda_plus[static_cast<std::size_t>(pos)] +
                   spec.lambda_minus[static_cast<std::size_t>(pos)];
        small_rhs[a] = spec.lambda_plus[static_cast<std::size_t>(pos)];
    }
    Eigen::VectorXd rho_b = m.partialPivLu().solve(small_rhs);
    std::vector<double> rb(rho_b.data(), rho_b.data() + nb);
    auto rho2 = tn.harmonic_extension(rb);

    double gap = 0.0;
    for (int i = 0; i < n; ++i) gap = std::max(gap, std::abs(rho[i] - rho2[static_cast<std::size_t>(i)]));
    if (gap > tol)
        raise(Errc::InconsistentSolutions,
              "Robin and Dirichlet-to-Neumann solutions differ by " + std::to_string(gap));

    DensityProfile out;
    out.rho.assign(rho.data(), rho.data() + n);
    out.route_gap = gap;
    out.energy = dirichlet_energy(g, out.rho);
    double gamma = spec.gamma();
    out.lower_bound = 1.0 / (1.0 + gamma);
    out.upper_bound = gamma / (1.0 + gamma);
    for (double v : out.rho)
        if (v < out.lower_bound - 1e-12 || v > out.upper_bound + 1e-12)
            raise(Errc::Internal, "stationary marginal escaped the density box");
    for (std::size_t i = 0; i < spec.size(); ++i)
        out.flows.push_back(flow(g, out.rho, spec.vertices[i]));
    return out;
}

ScalingReport scaling_report(const WeightedGraph& g, GraphExhaustion& ex,
                             const ScalingOptions& opts) {
    const int nl = ex.num_levels();
    if (nl < 3) raise(Errc::TooFewLevels, "scaling report needs at least 3 levels");

    PhiloxRng rng(derive_seed(opts.seed, "scaling-probes"));
    ScalingReport report;
    ex.mass_scale.assign(static_cast<std::size_t>(nl), 0.0);
    ex.time_scale.assign(static_cast<std::size_t>(nl), 0.0);

    int origin_idx = g.index_of(ex.origin);

    for (int lev = 0; lev < nl; ++lev) {
        const auto& ball = ex.ball_sets[static_cast<std::size_t>(lev)];
        ScalingLevel row;
        row.level = lev + 1;
        row.radius = ex.radii[static_cast<std::size_t>(lev)];
        row.volume = (opts.volume_mode == VolumeMode::Measure)
                         ? g.volume(ball)
                         : static_cast<double>(ball.size());
        if (!(row.volume > 0.0))
            raise(Errc::Internal, "level volume must be positive (isolated origin?)");

        if (static_cast<int>(ball.size()) >= g.num_vertices())
            raise(Errc::ComplementEmpty,
                  "ball at level " + std::to_string(row.level) +
                      " covers the whole graph; choose radii below the diameter");
        auto texit = exit_times(g, ball, opts.tol);
        if (opts.exit_mode == ExitMode::MaxOverBall) {
            row.exit_time = texit.maxCoeff();
        } else {
            auto it = std::find(ball.begin(), ball.end(), origin_idx);
            row.exit_time = texit[static_cast<int>(std::distance(ball.begin(), it))];
        }
        row.ratio = row.exit_time / row.volume;

        // Probe statistic inside B(o, r_{⌊εN⌋}), resistance in the level graph.
        int probe_index = std::max(1, static_cast<int>(std::floor(opts.epsilon * row.level)));
        const auto& probe_ball = ex.ball_sets[static_cast<std::size_t>(probe_index - 1)];
        const auto& level_graph = ex.levels[static_cast<std::size_t>(lev)];
        row.probe_min = kNaN;
        if (probe_ball.size() >= 2) {
            std::vector<std::pair<int, int>> pairs;
            {
                // Deterministic farthest pair by double BFS within the probe ball.
                auto d0 = g.distances_from(origin_idx);
                int far1 = probe_ball[0];
                for (int v : probe_ball)
                    if (d0[static_cast<std::size_t>(v)] > d0[static_cast<std::size_t>(far1)])
                        far1 = v;
                auto d1 = g.distances_from(far1);
                int far2 = probe_ball[0] == far1 ? probe_ball[1] : probe_ball[0];
                for (int v : probe_ball)
                    if (v != far1 &&
                        d1[static_cast<std::size_t>(v)] > d1[static_cast<std::size_t>(far2)])
                        far2 = v;
                pairs.emplace_back(far1, far2);
            }
            for (int i = 0; i < opts.random_pairs; ++i) {
                int y = probe_ball[rng.below(probe_ball.size())];
                int z = probe_ball[rng.below(probe_ball.size())];
                if (y != z) pairs.emplace_back(y, z);
            }
            double best = std::numeric_limits<double>::infinity();
            for (auto [y, z] : pairs) {
                double r = effective_resistance(level_graph, g.id_of(y), g.id_of(z), opts.tol);
                best = std::min(best, row.ratio / r);
            }
            row.probe_min = best;
        }

        // Einstein-relation diagnostic and the resistance-growth probe, both
        // in the mother graph.
        {
            auto cmpl = complement_of(g, ball);
            std::array<int, 1> center{origin_idx};
            double r_ball = effective_resistance(g, center, cmpl, opts.tol);
            auto it = std::find(ball.begin(), ball.end(), origin_idx);
            double t_origin = texit[static_cast<int>(std::distance(ball.begin(), it))];
            row.einstein = t_origin / (g.volume(ball) * r_ball);

            auto big = g.ball(ex.origin, opts.sr_multiplier * row.radius);
            if (static_cast<int>(big.size()) < g.num_vertices()) {
                auto big_cmpl = complement_of(g, big);
                double r_big = effective_resistance(g, center, big_cmpl, opts.tol);
                row.sr_ratio = r_big / r_ball;
            } else {
                row.sr_ratio = kNaN;
            }
        }

        ex.mass_scale[static_cast<std::size_t>(lev)] = row.volume;
        ex.time_scale[static_cast<std::size_t>(lev)] = row.exit_time;
        report.levels.push_back(row);
    }

    // Exponent fits use the trailing half of the levels; the first radii sit
    // in the pre-asymptotic transient (the r=1 ball is a single vertex) and
    // would bias the slope.
    int fit_count = std::max(3, (nl + 1) / 2);
    fit_count = std::min(fit_count, nl);
    report.fit_levels_used = fit_count;
    std::vector<double> logr, logv, logt;
    for (int lev = nl - fit_count; lev < nl; ++lev) {
        const auto& row = report.levels[static_cast<std::size_t>(lev)];
        logr.push_back(std::log(static_cast<double>(row.radius)));
        logv.push_back(std::log(row.volume));
        logt.push_back(std::log(row.exit_time));
    }
    report.alpha_hat = linear_fit(logr, logv, &report.alpha_residual);
    report.beta_hat = linear_fit(logr, logt, &report.beta_residual);
    return report;
}

} // namespace rsep
