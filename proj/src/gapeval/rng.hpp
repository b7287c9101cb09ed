#pragma once

#include <cstdint>
#include <random>

namespace gapeval {

/// Deterministic random source used everywhere seeds appear in the toolkit.
///
/// std::mt19937_64 has a bit-exact output sequence mandated by the standard,
/// but the standard *distributions* do not, so this class derives uniform and
/// Gaussian variates itself. Given the same seed, every platform and standard
/// library produces the same stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double strictly inside (0, 1).
    double uniform() {
        const std::uint64_t bits = engine_() >> 11; // 53 significant bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling keeps the
    /// stream unbiased and reproducible.
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal variate via the inverse CDF (one uniform per draw).
    double gaussian() { return inverse_normal_cdf(uniform()); }

    double gaussian(double sigma) { return sigma * gaussian(); }

    /// Derive an independent substream; mixing is splitmix64-style so nearby
    /// (seed, index) pairs land far apart in seed space.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    /// Quantile of the standard normal distribution (Wichura's PPND16
    /// rational approximation, accurate to ~1e-16 relative).
    static double inverse_normal_cdf(double p);

private:
    std::mt19937_64 engine_;
};

} // namespace gapeval
