#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rsep/potential.hpp"
#include "rsep/sep.hpp"
#include "rsep/simulate.hpp"

#include <cmath>

using namespace rsep;

TEST_CASE("particle conservation along conservative trajectories") {
    auto gg = make_sierpinski_gasket(2);
    PhiloxRng init(9, 0);
    auto eta0 = sample_product(MeasureSpec::product(0.5), gg.graph.num_vertices(), init);
    SimulateOptions opts;
    opts.horizon = 5.0;
    opts.seed = 1234;
    auto traj = simulate(gg.graph, nullptr, eta0, opts);
    CHECK(traj.final_state.particle_count() == eta0.particle_count());
    // every prefix conserves too
    for (double t : {0.5, 1.5, 3.2})
        CHECK(traj.replay_at(t).particle_count() == eta0.particle_count());
    // event times strictly increasing
    for (std::size_t i = 1; i < traj.events.size(); ++i)
        CHECK(traj.events[i].time > traj.events[i - 1].time);
}

TEST_CASE("byte-identical replay under a fixed seed") {
    auto p = make_path(6).graph;
    BoundarySpec spec;
    spec.vertices = {0, 6};
    spec.lambda_plus = {1.0, 0.3};
    spec.lambda_minus = {0.5, 0.9};
    auto eta0 = Configuration::from_state(0b0101010, 7);
    SimulateOptions opts;
    opts.horizon = 20.0;
    opts.seed = 777;
    opts.stream = 3;
    auto a = simulate(p, &spec, eta0, opts);
    auto b = simulate(p, &spec, eta0, opts);
    REQUIRE(a.events.size() == b.events.size());
    CHECK(!a.events.empty());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].time == b.events[i].time); // bitwise
        CHECK(a.events[i].x == b.events[i].x);
        CHECK(a.events[i].y == b.events[i].y);
    }
    SimulateOptions other = opts;
    other.stream = 4;
    auto c = simulate(p, &spec, eta0, other);
    bool identical = a.events.size() == c.events.size();
    if (identical)
        for (std::size_t i = 0; i < a.events.size(); ++i)
            if (a.events[i].time != c.events[i].time) identical = false;
    CHECK(!identical);
}

TEST_CASE("first event time is Exp(c) on a single discrepant edge") {
    double c = 2.3;
    auto edge = WeightedGraph::from_edges(std::vector<EdgeInput>{{0, 1, c}});
    auto eta0 = Configuration::from_state(0b01, 2);
    SimulateOptions opts;
    opts.horizon = 100.0;
    opts.seed = 31337;
    const int m = 10000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < m; ++i) {
        opts.stream = static_cast<std::uint64_t>(i);
        auto traj = simulate(edge, nullptr, eta0, opts);
        REQUIRE(!traj.events.empty());
        double t1 = traj.events[0].time;
        sum += t1;
        sumsq += t1 * t1;
    }
    double mean = sum / m;
    double var = sumsq / m - mean * mean;
    double se = std::sqrt(var / m);
    CHECK(std::abs(mean - 1.0 / c) <= 3.0 * se);
}

TEST_CASE("absorbing configurations complete trivially") {
    auto edge = WeightedGraph::from_edges(std::vector<EdgeInput>{{0, 1, 1.0}});
    auto full = Configuration::from_state(0b11, 2);
    SimulateOptions opts;
    opts.horizon = 1.0;
    auto traj = simulate(edge, nullptr, full, opts);
    CHECK(traj.events.empty());
    CHECK(traj.final_state == full);
}

TEST_CASE("time scale multiplies the event intensity") {
    auto p = make_path(4).graph;
    auto eta0 = Configuration::from_state(0b00110, 5);
    SimulateOptions slow;
    slow.horizon = 50.0;
    slow.seed = 5;
    SimulateOptions fast = slow;
    fast.time_scale = 8.0;
    double n_slow = 0, n_fast = 0;
    for (int i = 0; i < 200; ++i) {
        slow.stream = fast.stream = static_cast<std::uint64_t>(i);
        n_slow += static_cast<double>(simulate(p, nullptr, eta0, slow).events.size());
        n_fast += static_cast<double>(simulate(p, nullptr, eta0, fast).events.size());
    }
    CHECK(n_fast / n_slow == doctest::Approx(8.0).epsilon(0.1));
}

TEST_CASE("finite-time marginals match the matrix exponential") {
    auto p3 = make_path(3).graph; // 4 vertices, 16 states
    BoundarySpec spec;
    spec.vertices = {0, 3};
    spec.lambda_plus = {1.2, 0.4};
    spec.lambda_minus = {0.6, 1.1};
    auto eta0 = Configuration::from_state(0b0011, 4);
    double horizon = 0.8;

    auto q = generator_matrix(p3, &spec);
    std::vector<double> mu0(16, 0.0);
    mu0[eta0.state_index()] = 1.0;
    auto mu_t = transient_distribution(q, mu0, horizon);
    auto exact = one_site_marginals(mu_t, 4);

    const int m = 10000;
    std::vector<double> hits(4, 0.0);
    SimulateOptions opts;
    opts.horizon = horizon;
    opts.seed = 99;
    opts.record_events = false;
    for (int i = 0; i < m; ++i) {
        opts.stream = static_cast<std::uint64_t>(i);
        auto traj = simulate(p3, &spec, eta0, opts);
        for (int v = 0; v < 4; ++v)
            if (traj.final_state.at(v)) hits[static_cast<std::size_t>(v)] += 1.0;
    }
    for (int v = 0; v < 4; ++v) {
        double p_hat = hits[static_cast<std::size_t>(v)] / m;
        double p_exact = exact[static_cast<std::size_t>(v)];
        double se = std::sqrt(p_exact * (1.0 - p_exact) / m) + 1e-12;
        CHECK(std::abs(p_hat - p_exact) <= 4.0 * se);
    }
}

TEST_CASE("boundary-driven long-run occupancy approaches the density profile") {
    auto p4 = make_path(4).graph;
    BoundarySpec spec;
    spec.vertices = {0, 4};
    spec.lambda_plus = {2.0, 0.5};
    spec.lambda_minus = {1.0, 1.5};
    auto prof = stationary_marginal(p4, spec);

    std::vector<int> track{0, 1, 2, 3, 4};
    double horizon = 400.0;
    OccupationIntegral obs(track);
    std::array<Observer*, 1> observers{&obs};
    SimulateOptions opts;
    opts.horizon = horizon;
    opts.seed = 2024;
    opts.record_events = false;
    auto eta0 = Configuration::from_state(0, 5);
    simulate(p4, &spec, eta0, opts, observers);
    for (int v = 0; v <= 4; ++v) {
        double avg = obs.integrals()[static_cast<std::size_t>(v)] / horizon;
        CHECK(avg == doctest::Approx(prof.rho[static_cast<std::size_t>(v)]).epsilon(0.15));
    }
}

TEST_CASE("block average sampler agrees with replay") {
    auto p = make_path(5).graph;
    auto eta0 = Configuration::from_state(0b010101, 6);
    std::vector<int> block{1, 2, 3};
    std::vector<double> times{0.3, 0.9, 1.7, 2.4};
    BlockAverageSampler sampler(block, times);
    std::array<Observer*, 1> observers{&sampler};
    SimulateOptions opts;
    opts.horizon = 3.0;
    opts.seed = 4321;
    auto traj = simulate(p, nullptr, eta0, opts, observers);
    REQUIRE(sampler.samples().size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        auto eta = traj.replay_at(times[i]);
        int count = 0;
        for (int v : block)
            if (eta.at(v)) ++count;
        CHECK(sampler.samples()[i] == doctest::Approx(count / 3.0).epsilon(1e-12));
    }
}
