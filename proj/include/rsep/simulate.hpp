#pragma once

#include "rsep/boundary.hpp"
#include "rsep/graph.hpp"
#include "rsep/rng.hpp"
#include "rsep/sep.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rsep {

struct Event {
    double time;
    Transition::Kind kind;
    int x; // dense index; swap partner y, flips use x only
    int y;
};

/// Receives the exact piecewise-constant path. `on_event` fires after the
/// configuration was updated; exact time integrals accumulate f(η)·Δt with
/// the value held since the previous call.
class Observer {
public:
    virtual ~Observer() = default;
    virtual void begin(const Configuration& eta) { (void)eta; }
    virtual void on_event(double t, const Event& e, const Configuration& eta) {
        (void)t;
        (void)e;
        (void)eta;
    }
    virtual void finish(double horizon, const Configuration& eta) {
        (void)horizon;
        (void)eta;
    }
};

struct SimulateOptions {
    double time_scale = 1.0; // the 𝒯_N speed-up multiplying every rate
    double horizon = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0; // trajectory index
    bool record_events = true;
};

struct Trajectory {
    Configuration initial;
    Configuration final_state;
    std::vector<Event> events; // strictly increasing times (empty unless recording)
    double horizon = 0.0;
    double time_scale = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string rng_algorithm = PhiloxRng::kAlgorithm;

    /// Configuration at time t by replaying the event log.
    Configuration replay_at(double t) const;
};

/// Exact event-driven simulation (competing exponential clocks; no time
/// discretization). An absorbing configuration simply completes the
/// trajectory at the horizon.
Trajectory simulate(const WeightedGraph& g, const BoundarySpec* spec,
                    const Configuration& eta0, const SimulateOptions& opts,
                    std::span<Observer* const> observers = {});

/// Samples a configuration from a product measure.
Configuration sample_product(const MeasureSpec& nu, int n, PhiloxRng& rng);

// --- stock observers -------------------------------------------------------

/// Exact ∫_0^T η_t(v) dt for a set of tracked vertices.
class OccupationIntegral : public Observer {
public:
    explicit OccupationIntegral(std::vector<int> vertices)
        : vertices_(std::move(vertices)), integrals_(vertices_.size(), 0.0) {}

    void begin(const Configuration& eta) override;
    void on_event(double t, const Event& e, const Configuration& eta) override;
    void finish(double horizon, const Configuration& eta) override;

    const std::vector<double>& integrals() const { return integrals_; }

private:
    std::vector<int> vertices_;
    std::vector<double> integrals_;
    std::vector<char> occupied_;
    double last_t_ = 0.0;
};

/// Block average ⟨η⟩_Λ sampled at fixed times (piecewise-exact lookup).
class BlockAverageSampler : public Observer {
public:
    BlockAverageSampler(std::vector<int> block, std::vector<double> sample_times);

    void begin(const Configuration& eta) override;
    void on_event(double t, const Event& e, const Configuration& eta) override;
    void finish(double horizon, const Configuration& eta) override;

    const std::vector<double>& samples() const { return samples_; }

private:
    void emit_until(double t);

    std::vector<int> block_;
    std::vector<char> member_;
    std::vector<double> times_;
    std::vector<double> samples_;
    std::size_t cursor_ = 0;
    int count_ = 0;
    double last_t_ = 0.0;
};

} // namespace rsep
