#pragma once

#include <array>
#include <cstdint>

namespace rsep {

/// Philox4x32-10 counter-based generator. Streams are cheap: the 64-bit
/// stream id occupies the top half of the counter block, so per-trajectory
/// streams derived from (seed, trajectory index) never collide. Replay is
/// bit-exact across platforms.
class PhiloxRng {
public:
    static constexpr const char* kAlgorithm = "philox4x32-10";

    explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform on (0,1]; never returns 0, so log() is always finite.
    double uniform();
    /// Uniform on [0,1).
    double uniform_co();
    double exponential(double rate);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal(); // standard normal via Box-Muller

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int available_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;

    void refill();
};

/// Stable sub-seed derivation: hashes (seed, purpose label) so independent
/// uses of one master seed do not overlap.
std::uint64_t derive_seed(std::uint64_t master, const char* purpose);

} // namespace rsep
