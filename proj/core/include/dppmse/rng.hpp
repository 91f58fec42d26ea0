#pragma once

#include <cstdint>
#include <random>

namespace dppmse {

/// splitmix64 finalizer; good avalanche, used for deriving seed streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent child seed from (base, stream). Streams with the
/// same base but different indices give statistically unrelated sequences,
/// which is the contract parallel replicates rely on.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(splitmix64(base) ^ splitmix64(~stream));
}

/// Seeded random source. All randomness in the library flows through an
/// explicit RandomSource so every operation is a pure function of its seed.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in [0, 1).
    double uniform01() { return unit_(engine_); }

    /// Gaussian draw; sd == 0 returns the mean exactly.
    double normal(double mean, double sd);

    /// Zero-centered Laplace draw with the given scale (must be > 0).
    double laplace(double scale);

    double gamma(double shape, double scale);
    double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }

    /// Uniform integer in [0, bound).
    std::uint64_t uniform_index(std::uint64_t bound);

    /// Advances the engine and returns 64 raw bits; used to derive child seeds.
    std::uint64_t next_raw() { return engine_(); }

    std::mt19937_64 &engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace dppmse
