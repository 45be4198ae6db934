#pragma once

#include <cstdint>
#include <cmath>

namespace divdraw {

/// SplitMix64. Small, fast, and the whole stream is a pure function of the
/// 64-bit state it starts from, which is what the per-path reproducibility
/// contract needs.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Stream for path k derived from (seed, k) only — independent of thread
/// scheduling. Two scramble rounds decorrelate neighbouring path indices.
inline SplitMix64 path_stream(std::uint64_t seed, std::uint64_t k) {
    SplitMix64 mixer(seed ^ (0xA0761D6478BD642Full * (k + 1)));
    mixer.next();
    std::uint64_t s = mixer.next();
    return SplitMix64(s);
}

/// Standard normals via the polar (Marsaglia) method; caches the spare.
class NormalSampler {
public:
    explicit NormalSampler(SplitMix64 rng) : rng_(rng) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.uniform01() - 1.0;
            v = 2.0 * rng_.uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace divdraw
