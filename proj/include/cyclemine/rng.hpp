#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cyclemine {

inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    // splitmix64 finalizer over the combined value
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random source. mt19937_64 is fully specified by the
/// standard and all derived draws below use only integer/bit transforms,
/// so identical seeds give identical streams on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(mix_seed(seed, 0x5eedULL)) {}

    uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be > 0.
    uint64_t next_index(uint64_t n) {
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            const uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

    /// Standard normal via Box-Muller (no state cached between calls).
    double next_normal() {
        const double u1 = 1.0 - next_double(); // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Lognormal with the given arithmetic mean and log-space sigma.
    double next_lognormal_mean(double mean, double sigma) {
        const double mu = std::log(mean) - 0.5 * sigma * sigma;
        return std::exp(mu + sigma * next_normal());
    }

    /// Independent child stream.
    Rng split(uint64_t stream) { return Rng(mix_seed(next_u64(), stream)); }

private:
    std::mt19937_64 gen_;
};

} // namespace cyclemine
