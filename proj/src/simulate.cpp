#include "rsep/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace rsep {

namespace {

// Fenwick tree with prefix-sum sampling; values kept alongside for exact
// slot replacement.
class RateTree {
public:
    explicit RateTree(int n)
        : n_(n), values_(static_cast<std::size_t>(n), 0.0),
          tree_(static_cast<std::size_t>(n) + 1, 0.0) {
        log2_ = 1;
        while ((1 << log2_) <= n_) ++log2_;
    }

    void set(int i, double v) {
        double delta = v - values_[static_cast<std::size_t>(i)];
        if (delta == 0.0) return;
        values_[static_cast<std::size_t>(i)] = v;
        for (int j = i + 1; j <= n_; j += j & -j) tree_[static_cast<std::size_t>(j)] += delta;
        total_ += delta;
    }

    double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
    double total() const { return total_; }

    /// Smallest slot whose prefix sum exceeds `target`; clamps into the
    /// nearest active slot against roundoff at the edges.
    int sample(double target) const {
        int pos = 0;
        double rest = target;
        for (int step = 1 << (log2_ - 1); step > 0; step >>= 1) {
            int next = pos + step;
            if (next <= n_ && tree_[static_cast<std::size_t>(next)] <= rest) {
                rest -= tree_[static_cast<std::size_t>(next)];
                pos = next;
            }
        }
        // pos is now the count of slots with cumulative sum <= target.
        int slot = std::min(pos, n_ - 1);
        while (slot > 0 && values_[static_cast<std::size_t>(slot)] <= 0.0) --slot;
        while (slot < n_ - 1 && values_[static_cast<std::size_t>(slot)] <= 0.0) ++slot;
        return slot;
    }

    void rebuild() {
        std::fill(tree_.begin(), tree_.end(), 0.0);
        total_ = 0.0;
        auto snapshot = values_;
        std::fill(values_.begin(), values_.end(), 0.0);
        for (int i = 0; i < n_; ++i) set(i, snapshot[static_cast<std::size_t>(i)]);
    }

private:
    int n_;
    int log2_;
    double total_ = 0.0;
    std::vector<double> values_;
    std::vector<double> tree_;
};

} // namespace

Configuration Trajectory::replay_at(double t) const {
    Configuration eta = initial;
    for (const auto& e : events) {
        if (e.time > t) break;
        if (e.kind == Transition::Kind::Swap)
            eta.apply_swap(e.x, e.y);
        else
            eta.apply_flip(e.x);
    }
    return eta;
}

Configuration sample_product(const MeasureSpec& nu, int n, PhiloxRng& rng) {
    Configuration eta(n);
    for (int i = 0; i < n; ++i) {
        double p = 0.0;
        switch (nu.kind) {
        case MeasureSpec::Kind::ProductConstant: p = nu.alpha; break;
        case MeasureSpec::Kind::ProductProfile:
            p = nu.profile[static_cast<std::size_t>(i)];
            break;
        case MeasureSpec::Kind::Explicit:
            raise(Errc::ValidationError, "sampling needs a product measure");
        }
        if (rng.uniform_co() < p) eta.set(i, true);
    }
    return eta;
}

Trajectory simulate(const WeightedGraph& g, const BoundarySpec* spec,
                    const Configuration& eta0, const SimulateOptions& opts,
                    std::span<Observer* const> observers) {
    if (eta0.size() != g.num_vertices())
        raise(Errc::ValidationError, "initial configuration size does not match graph");
    if (!(opts.time_scale > 0.0)) raise(Errc::ValidationError, "time scale must be positive");
    if (!(opts.horizon > 0.0)) raise(Errc::ValidationError, "horizon must be positive");
    if (spec != nullptr) spec->validate(g);

    const int n_edges = g.num_edges();
    const int n_flips = spec != nullptr ? static_cast<int>(spec->size()) : 0;

    // Slot layout: edges first, then one flip slot per reservoir.
    RateTree rates(std::max(1, n_edges + n_flips));
    std::vector<std::vector<int>> incident_edges(static_cast<std::size_t>(g.num_vertices()));
    for (int ei = 0; ei < n_edges; ++ei) {
        const auto& e = g.edges()[static_cast<std::size_t>(ei)];
        incident_edges[static_cast<std::size_t>(e.u)].push_back(ei);
        incident_edges[static_cast<std::size_t>(e.v)].push_back(ei);
    }
    std::vector<int> flip_slot(static_cast<std::size_t>(g.num_vertices()), -1);
    std::vector<double> flip_lp, flip_lm;
    if (spec != nullptr)
        for (std::size_t i = 0; i < spec->size(); ++i) {
            int a = g.index_of(spec->vertices[i]);
            flip_slot[static_cast<std::size_t>(a)] = n_edges + static_cast<int>(i);
            flip_lp.push_back(spec->lambda_plus[i]);
            flip_lm.push_back(spec->lambda_minus[i]);
        }

    Configuration eta = eta0;
    auto refresh_edge = [&](int ei) {
        const auto& e = g.edges()[static_cast<std::size_t>(ei)];
        rates.set(ei, eta.at(e.u) != eta.at(e.v) ? e.c : 0.0);
    };
    auto refresh_flip = [&](int v) {
        int slot = flip_slot[static_cast<std::size_t>(v)];
        if (slot < 0) return;
        std::size_t i = static_cast<std::size_t>(slot - n_edges);
        rates.set(slot, eta.at(v) ? flip_lm[i] : flip_lp[i]);
    };
    auto refresh_vertex = [&](int v) {
        for (int ei : incident_edges[static_cast<std::size_t>(v)]) refresh_edge(ei);
        refresh_flip(v);
    };
    for (int v = 0; v < g.num_vertices(); ++v) refresh_vertex(v);

    Trajectory traj;
    traj.initial = eta0;
    traj.horizon = opts.horizon;
    traj.time_scale = opts.time_scale;
    traj.seed = opts.seed;
    traj.stream = opts.stream;

    PhiloxRng rng(opts.seed, opts.stream);
    for (Observer* obs : observers) obs->begin(eta);

    double t = 0.0;
    std::uint64_t steps = 0;
    while (true) {
        double total = rates.total();
        if (!(total > 0.0)) break; // absorbing configuration; runs out the clock
        t += rng.exponential(total * opts.time_scale);
        if (t >= opts.horizon) break;

        int slot = rates.sample(rng.uniform_co() * total);
        Event ev;
        ev.time = t;
        if (slot < n_edges) {
            const auto& e = g.edges()[static_cast<std::size_t>(slot)];
            ev.kind = Transition::Kind::Swap;
            ev.x = e.u;
            ev.y = e.v;
            eta.apply_swap(e.u, e.v);
            refresh_vertex(e.u);
            refresh_vertex(e.v);
        } else {
            int a = g.index_of(spec->vertices[static_cast<std::size_t>(slot - n_edges)]);
            ev.kind = Transition::Kind::Flip;
            ev.x = a;
            ev.y = -1;
            eta.apply_flip(a);
            refresh_vertex(a);
        }
        if (opts.record_events) traj.events.push_back(ev);
        for (Observer* obs : observers) obs->on_event(t, ev, eta);

        if ((++steps & 0xFFFFFu) == 0) rates.rebuild(); // cancel float drift
    }

    for (Observer* obs : observers) obs->finish(opts.horizon, eta);
    traj.final_state = eta;
    return traj;
}

// --- observers -------------------------------------------------------------

void OccupationIntegral::begin(const Configuration& eta) {
    occupied_.resize(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        occupied_[i] = eta.at(vertices_[i]) ? 1 : 0;
    last_t_ = 0.0;
}

void OccupationIntegral::on_event(double t, const Event& e, const Configuration& eta) {
    double dt = t - last_t_;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (occupied_[i]) integrals_[i] += dt;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        occupied_[i] = eta.at(vertices_[i]) ? 1 : 0;
    (void)e;
    last_t_ = t;
}

void OccupationIntegral::finish(double horizon, const Configuration& eta) {
    double dt = horizon - last_t_;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (occupied_[i]) integrals_[i] += dt;
    (void)eta;
    last_t_ = horizon;
}

BlockAverageSampler::BlockAverageSampler(std::vector<int> block,
                                         std::vector<double> sample_times)
    : block_(std::move(block)), times_(std::move(sample_times)) {
    std::sort(times_.begin(), times_.end());
}

void BlockAverageSampler::begin(const Configuration& eta) {
    member_.assign(static_cast<std::size_t>(eta.size()), 0);
    count_ = 0;
    for (int v : block_) {
        member_[static_cast<std::size_t>(v)] = 1;
        if (eta.at(v)) ++count_;
    }
    cursor_ = 0;
    last_t_ = 0.0;
    samples_.clear();
}

void BlockAverageSampler::emit_until(double t) {
    while (cursor_ < times_.size() && times_[cursor_] < t) {
        samples_.push_back(static_cast<double>(count_) / static_cast<double>(block_.size()));
        ++cursor_;
    }
}

void BlockAverageSampler::on_event(double t, const Event& e, const Configuration& eta) {
    emit_until(t);
    if (e.kind == Transition::Kind::Swap) {
        bool in_x = member_[static_cast<std::size_t>(e.x)] != 0;
        bool in_y = member_[static_cast<std::size_t>(e.y)] != 0;
        if (in_x != in_y) {
            // the particle crossed the block boundary iff the inside endpoint changed
            int inside = in_x ? e.x : e.y;
            count_ += eta.at(inside) ? 1 : -1;
        }
    } else if (member_[static_cast<std::size_t>(e.x)] != 0) {
        count_ += eta.at(e.x) ? 1 : -1;
    }
    last_t_ = t;
}

void BlockAverageSampler::finish(double horizon, const Configuration& eta) {
    emit_until(horizon + 1.0);
    (void)eta;
    (void)horizon;
}

} // namespace rsep
