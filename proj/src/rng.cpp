#include "rsep/rng.hpp"

#include <cmath>
#include <cstring>

namespace rsep {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
}

} // namespace

std::array<std::uint32_t, 4> PhiloxRng::block(const std::array<std::uint32_t, 4>& counter,
                                              const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> x = counter;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0 = mulhi(kPhiloxM0, x[0]);
        std::uint32_t lo0 = kPhiloxM0 * x[0];
        std::uint32_t hi1 = mulhi(kPhiloxM1, x[2]);
        std::uint32_t lo1 = kPhiloxM1 * x[2];
        x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return x;
}

void PhiloxRng::refill() {
    std::array<std::uint32_t, 4> counter = {
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = block(counter, key_);
    ++counter_;
    available_ = 4;
}

std::uint32_t PhiloxRng::next_u32() {
    if (available_ == 0) refill();
    return buffer_[static_cast<std::size_t>(4 - available_--)];
}

std::uint64_t PhiloxRng::next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double PhiloxRng::uniform() {
    // 53 random bits; (x+1)/2^53 lies in (0,1].
    std::uint64_t x = next_u64() >> 11;
    return static_cast<double>(x + 1) * 0x1.0p-53;
}

double PhiloxRng::uniform_co() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxRng::exponential(double rate) {
    return -std::log(uniform()) / rate;
}

std::uint64_t PhiloxRng::below(std::uint64_t n) {
    // Rejection to avoid modulo bias.
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double PhiloxRng::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform();
    double u2 = uniform_co();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

std::uint64_t derive_seed(std::uint64_t master, const char* purpose) {
    // FNV-1a over the label, then splitmix64-style finalization with the seed.
    std::uint64_t h = 1469598103934665603ull;
    for (const char* p = purpose; *p != '\0'; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ull;
    }
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull + h;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace rsep
