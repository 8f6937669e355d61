#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace planarize {

/// Deterministic RNG wrapper. All randomized routines take an Rng by
/// reference; nothing in the library touches global random state. Identical
/// seeds give identical runs (acceptance requires bit-reproducible reports,
/// so bounded draws avoid std::uniform_int_distribution, whose output is
/// implementation-defined).
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed ^ 0x9e3779b97f4a7c15ULL) {}

    uint64_t raw() { return eng_(); }

    /// Uniform integer in [0, n). n must be positive.
    int next_int(int n) { return static_cast<int>(raw() % static_cast<uint64_t>(n)); }

    /// Uniform double in [0, 1).
    double next_real() { return (raw() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_real() < p; }

    /// Derived stream: hash(seed, tag) so per-instance streams are
    /// independent of processing order.
    static Rng derive(uint64_t root_seed, uint64_t tag) {
        uint64_t x = root_seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
        x ^= x >> 30; x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27; x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return Rng(x);
    }

private:
    std::mt19937_64 eng_;
};

} // namespace planarize
