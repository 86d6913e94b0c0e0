#include "rsep/sep.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

namespace rsep {

Configuration Configuration::from_state(std::uint64_t state, int n) {
    Configuration eta(n);
    for (int i = 0; i < n; ++i)
        if ((state >> i) & 1u) eta.set(i, true);
    return eta;
}

void Configuration::set(int i, bool v) {
    auto& cell = occ_[static_cast<std::size_t>(i)];
    count_ += static_cast<int>(v) - static_cast<int>(cell);
    cell = v ? 1 : 0;
}

void Configuration::apply_swap(int x, int y) {
    std::swap(occ_[static_cast<std::size_t>(x)], occ_[static_cast<std::size_t>(y)]);
}

void Configuration::apply_flip(int a) {
    auto& cell = occ_[static_cast<std::size_t>(a)];
    count_ += cell ? -1 : 1;
    cell ^= 1u;
}

Configuration Configuration::swapped(int x, int y) const {
    Configuration out = *this;
    out.apply_swap(x, y);
    return out;
}

Configuration Configuration::flipped(int a) const {
    Configuration out = *this;
    out.apply_flip(a);
    return out;
}

std::uint64_t Configuration::state_index() const {
    if (size() > 63) raise(Errc::StateSpaceTooLarge, "state index needs |V| <= 63");
    std::uint64_t s = 0;
    for (int i = 0; i < size(); ++i)
        if (at(i)) s |= (std::uint64_t{1} << i);
    return s;
}

std::vector<Transition> active_rates(const WeightedGraph& g, const BoundarySpec* spec,
                                     const Configuration& eta) {
    if (eta.size() != g.num_vertices())
        raise(Errc::ValidationError, "configuration size does not match graph");
    std::vector<Transition> out;
    for (const auto& e : g.edges())
        if (eta.at(e.u) != eta.at(e.v))
            out.push_back({Transition::Kind::Swap, e.u, e.v, e.c});
    if (spec != nullptr) {
        for (std::size_t i = 0; i < spec->size(); ++i) {
            int a = g.index_of(spec->vertices[i]);
            double rate = eta.at(a) ? spec->lambda_minus[i] : spec->lambda_plus[i];
            out.push_back({Transition::Kind::Flip, a, -1, rate});
        }
    }
    return out;
}

MeasureSpec MeasureSpec::product(double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        raise(Errc::ValidationError, "density must lie in [0,1]");
    MeasureSpec m;
    m.kind = Kind::ProductConstant;
    m.alpha = alpha;
    return m;
}

MeasureSpec MeasureSpec::product_profile(std::vector<double> profile) {
    for (double p : profile)
        if (p < 0.0 || p > 1.0) raise(Errc::ValidationError, "profile values must lie in [0,1]");
    MeasureSpec m;
    m.kind = Kind::ProductProfile;
    m.profile = std::move(profile);
    return m;
}

MeasureSpec MeasureSpec::explicit_distribution(std::vector<double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) raise(Errc::ValidationError, "explicit weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        raise(Errc::ValidationError, "explicit distribution must sum to 1 within 1e-12");
    MeasureSpec m;
    m.kind = Kind::Explicit;
    m.weights = std::move(weights);
    return m;
}

double MeasureSpec::mass(const Configuration& eta) const {
    switch (kind) {
    case Kind::ProductConstant: {
        double p = 1.0;
        for (int i = 0; i < eta.size(); ++i) p *= eta.at(i) ? alpha : 1.0 - alpha;
        return p;
    }
    case Kind::ProductProfile: {
        if (static_cast<int>(profile.size()) != eta.size())
            raise(Errc::ValidationError, "profile size does not match configuration");
        double p = 1.0;
        for (int i = 0; i < eta.size(); ++i) {
            double r = profile[static_cast<std::size_t>(i)];
            p *= eta.at(i) ? r : 1.0 - r;
        }
        return p;
    }
    case Kind::Explicit: {
        auto s = eta.state_index();
        if (s >= weights.size()) raise(Errc::ValidationError, "state outside explicit support");
        return weights[static_cast<std::size_t>(s)];
    }
    }
    raise(Errc::Internal, "unreachable");
}

double MeasureSpec::mass_of_state(std::uint64_t state, int n) const {
    return mass(Configuration::from_state(state, n));
}

namespace {

void check_state_cap(const WeightedGraph& g) {
    if (g.num_vertices() > kStateCap)
        raise(Errc::StateSpaceTooLarge,
              "dense state-space work capped at " + std::to_string(kStateCap) +
                  " vertices, got " + std::to_string(g.num_vertices()));
}

} // namespace

Eigen::SparseMatrix<double> generator_matrix(const WeightedGraph& g, const BoundarySpec* spec,
                                             GeneratorPart part) {
    check_state_cap(g);
    const int n = g.num_vertices();
    const std::int64_t nstates = std::int64_t{1} << n;

    std::vector<int> boundary_idx;
    std::vector<double> lp, lm;
    if (spec != nullptr && part != GeneratorPart::Exchange) {
        spec->validate(g);
        for (std::size_t i = 0; i < spec->size(); ++i) {
            boundary_idx.push_back(g.index_of(spec->vertices[i]));
            lp.push_back(spec->lambda_plus[i]);
            lm.push_back(spec->lambda_minus[i]);
        }
    }

    std::vector<Eigen::Triplet<double>> trip;
    for (std::int64_t s = 0; s < nstates; ++s) {
        double total = 0.0;
        if (part != GeneratorPart::Boundary) {
            for (const auto& e : g.edges()) {
                bool ou = (s >> e.u) & 1;
                bool ov = (s >> e.v) & 1;
                if (ou == ov) continue;
                std::int64_t t = s ^ (std::int64_t{1} << e.u) ^ (std::int64_t{1} << e.v);
                trip.emplace_back(static_cast<int>(s), static_cast<int>(t), e.c);
                total += e.c;
            }
        }
        for (std::size_t i = 0; i < boundary_idx.size(); ++i) {
            int a = boundary_idx[i];
            bool occ = (s >> a) & 1;
            double rate = occ ? lm[i] : lp[i];
            std::int64_t t = s ^ (std::int64_t{1} << a);
            trip.emplace_back(static_cast<int>(s), static_cast<int>(t), rate);
            total += rate;
        }
        if (total != 0.0) trip.emplace_back(static_cast<int>(s), static_cast<int>(s), -total);
    }
    Eigen::SparseMatrix<double> q(static_cast<int>(nstates), static_cast<int>(nstates));
    q.setFromTriplets(trip.begin(), trip.end());
    return q;
}

std::vector<std::uint64_t> hyperplane_states(int n, int k) {
    if (k < 0 || k > n) raise(Errc::KOutOfRange, "particle number outside 0..|V|");
    std::vector<std::uint64_t> states;
    if (k == 0) {
        states.push_back(0);
        return states;
    }
    // Gosper's hack over n-bit masks with k bits set.
    std::uint64_t v = (std::uint64_t{1} << k) - 1;
    std::uint64_t limit = std::uint64_t{1} << n;
    while (v < limit) {
        states.push_back(v);
        std::uint64_t t = v | (v - 1);
        v = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
    }
    return states;
}

Eigen::SparseMatrix<double> restrict_generator(const Eigen::SparseMatrix<double>& q,
                                               std::span<const std::uint64_t> states) {
    std::vector<std::int64_t> local(static_cast<std::size_t>(q.rows()), -1);
    for (std::size_t i = 0; i < states.size(); ++i)
        local[static_cast<std::size_t>(states[i])] = static_cast<std::int64_t>(i);
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < q.outerSize(); ++col) {
        std::int64_t lc = local[static_cast<std::size_t>(col)];
        if (lc < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(q, col); it; ++it) {
            std::int64_t lr = local[static_cast<std::size_t>(it.row())];
            if (lr < 0) continue;
            trip.emplace_back(static_cast<int>(lr), static_cast<int>(lc), it.value());
        }
    }
    Eigen::SparseMatrix<double> sub(static_cast<int>(states.size()),
                                    static_cast<int>(states.size()));
    sub.setFromTriplets(trip.begin(), trip.end());
    return sub;
}

namespace {

// Strong connectivity of the off-diagonal support (forward and backward
// reachability from state 0).
bool strongly_connected(const Eigen::SparseMatrix<double>& q) {
    const int n = static_cast<int>(q.rows());
    if (n <= 1) return true;
    Eigen::SparseMatrix<double, Eigen::RowMajor> fwd(q);
    auto bfs = [&](auto neighbors) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::deque<int> queue{0};
        seen[0] = 1;
        int visited = 1;
        while (!queue.empty()) {
            int s = queue.front();
            queue.pop_front();
            neighbors(s, [&](int t) {
                if (!seen[static_cast<std::size_t>(t)]) {
                    seen[static_cast<std::size_t>(t)] = 1;
                    ++visited;
                    queue.push_back(t);
                }
            });
        }
        return visited == n;
    };
    bool forward = bfs([&](int s, auto&& visit) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(fwd, s); it; ++it)
            if (it.col() != s && it.value() > 0.0) visit(static_cast<int>(it.col()));
    });
    bool backward = bfs([&](int s, auto&& visit) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(q, s); it; ++it)
            if (it.row() != s && it.value() > 0.0) visit(static_cast<int>(it.row()));
    });
    return forward && backward;
}

} // namespace

StationaryResult stationary_distribution(const Eigen::SparseMatrix<double>& q) {
    const int n = static_cast<int>(q.rows());
    if (!strongly_connected(q))
        raise(Errc::NotIrreducible,
              "generator is not irreducible; restrict to a particle-number hyperplane first");

    // Solve Qᵀ μ = 0 with the last equation replaced by Σ μ = 1.
    Eigen::SparseMatrix<double> a = q.transpose();
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < a.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it)
            if (it.row() != n - 1)
                trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                  it.value());
    for (int col = 0; col < n; ++col) trip.emplace_back(n - 1, col, 1.0);
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver(m);
    if (solver.info() != Eigen::Success)
        raise(Errc::Internal, "stationary solve failed to factorize");
    Eigen::VectorXd mu = solver.solve(rhs);
    Eigen::VectorXd r = rhs - m * mu;
    if (r.cwiseAbs().maxCoeff() > 1e-13) mu += solver.solve(r);

    // Clean tiny negatives from roundoff and renormalize.
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (mu[i] < 0.0 && mu[i] > -1e-12) mu[i] = 0.0;
        if (mu[i] < 0.0) raise(Errc::Internal, "stationary vector has a negative entry");
        total += mu[i];
    }
    mu /= total;

    StationaryResult out;
    out.weights.assign(mu.data(), mu.data() + n);
    Eigen::VectorXd check = q.transpose() * mu;
    out.residual = check.cwiseAbs().maxCoeff();
    if (out.residual > 1e-10) raise(Errc::Internal, "stationary residual above 1e-10");
    return out;
}

std::vector<double> one_site_marginals(std::span<const double> weights, int n) {
    std::vector<double> marg(static_cast<std::size_t>(n), 0.0);
    for (std::size_t s = 0; s < weights.size(); ++s)
        for (int i = 0; i < n; ++i)
            if ((s >> i) & 1u) marg[static_cast<std::size_t>(i)] += weights[s];
    return marg;
}

double detailed_balance_residual(const WeightedGraph& g, const BoundarySpec* spec,
                                 GeneratorPart part, const MeasureSpec& measure) {
    check_state_cap(g);
    const int n = g.num_vertices();
    const std::int64_t nstates = std::int64_t{1} << n;

    std::vector<int> boundary_idx;
    std::vector<double> lp, lm;
    if (spec != nullptr && part != GeneratorPart::Exchange) {
        for (std::size_t i = 0; i < spec->size(); ++i) {
            boundary_idx.push_back(g.index_of(spec->vertices[i]));
            lp.push_back(spec->lambda_plus[i]);
            lm.push_back(spec->lambda_minus[i]);
        }
    }

    double worst = 0.0;
    for (std::int64_t s = 0; s < nstates; ++s) {
        auto eta = Configuration::from_state(static_cast<std::uint64_t>(s), n);
        double mu_s = measure.mass(eta);
        if (part != GeneratorPart::Boundary) {
            for (const auto& e : g.edges()) {
                if (eta.at(e.u) == eta.at(e.v)) continue;
                auto etb = eta.swapped(e.u, e.v);
                // symmetric swap rate c both ways
                worst = std::max(worst, std::abs(mu_s * e.c - measure.mass(etb) * e.c));
            }
        }
        for (std::size_t i = 0; i < boundary_idx.size(); ++i) {
            int a = boundary_idx[i];
            double fwd = eta.at(a) ? lm[i] : lp[i];
            double bwd = eta.at(a) ? lp[i] : lm[i];
            auto etb = eta.flipped(a);
            worst = std::max(worst, std::abs(mu_s * fwd - measure.mass(etb) * bwd));
        }
    }
    return worst;
}

namespace {

double marginal_at(const MeasureSpec& nu, int i) {
    switch (nu.kind) {
    case MeasureSpec::Kind::ProductConstant: return nu.alpha;
    case MeasureSpec::Kind::ProductProfile: return nu.profile[static_cast<std::size_t>(i)];
    case MeasureSpec::Kind::Explicit:
        raise(Errc::ValidationError, "Radon-Nikodym ratio needs a product measure");
    }
    raise(Errc::Internal, "unreachable");
}

double check_open(double h) {
    if (h <= 0.0 || h >= 1.0)
        raise(Errc::DegenerateMarginal, "product marginal must lie strictly inside (0,1)");
    return h;
}

} // namespace

double radon_nikodym_ratio(const MeasureSpec& nu, const Configuration& eta, SwapMove move) {
    if (eta.at(move.x) == eta.at(move.y)) {
        check_open(marginal_at(nu, move.x));
        check_open(marginal_at(nu, move.y));
        return 1.0;
    }
    int occupied = eta.at(move.x) ? move.x : move.y;
    int empty = eta.at(move.x) ? move.y : move.x;
    double ho = check_open(marginal_at(nu, occupied));
    double he = check_open(marginal_at(nu, empty));
    // the particle moves from `occupied` to `empty`
    return ((1.0 - ho) * he) / (ho * (1.0 - he));
}

double radon_nikodym_ratio(const MeasureSpec& nu, const Configuration& eta, FlipMove move) {
    double h = check_open(marginal_at(nu, move.a));
    return eta.at(move.a) ? (1.0 - h) / h : h / (1.0 - h);
}

std::vector<double> transient_distribution(const Eigen::SparseMatrix<double>& q,
                                           std::span<const double> mu0, double t) {
    const int n = static_cast<int>(q.rows());
    double lambda = 0.0;
    for (int i = 0; i < n; ++i) lambda = std::max(lambda, -q.coeff(i, i));
    if (lambda == 0.0 || t == 0.0) return {mu0.begin(), mu0.end()};
    Eigen::Map<const Eigen::VectorXd> start(mu0.data(), n);

    // Uniformization: μ0 e^{tQ} = Σ_k Pois(λt; k) μ0 P^k with P = I + Q/λ.
    Eigen::SparseMatrix<double> qt = q.transpose();
    double lt = lambda * t;
    int kmax = static_cast<int>(lt + 12.0 * std::sqrt(lt) + 40.0);
    Eigen::VectorXd vk = start;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    double logw = -lt; // log Pois(λt; 0)
    for (int k = 0; k <= kmax; ++k) {
        if (logw > -745.0) acc += std::exp(logw) * vk;
        vk = vk + (qt * vk) / lambda;
        logw += std::log(lt) - std::log(static_cast<double>(k + 1));
    }
    return {acc.data(), acc.data() + n};
}

} // namespace rsep
