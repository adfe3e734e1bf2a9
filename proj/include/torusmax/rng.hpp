#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace torusmax {

// SplitMix64 step. Fully specified, so every stream derived from a seed is
// reproducible across platforms and compilers.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Fixed mixing of (master, a, b) into one stream seed. Ensemble code seeds
// path k of coordinate n with mix_seed(master, n, k); results are therefore
// independent of iteration order and thread scheduling.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = master;
    s = splitmix64(s) ^ (a * 0xC2B2AE3D27D4EB4FULL + 0x165667B19E3779F9ULL);
    s = splitmix64(s) ^ (b * 0xD6E8FEB86659FD93ULL + 0x9E3779B97F4A7C15ULL);
    return splitmix64(s);
}

// Xoshiro256++ seeded through SplitMix64. All floating-point draws are
// produced by explicit bit manipulation, never by std:: distributions, so a
// seed pins the exact sample sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [-1, 1).
    double uniform_signed() { return 2.0 * uniform() - 1.0; }

    // Pair of independent standard normals (Marsaglia polar method).
    std::pair<double, double> gaussian_pair() {
        for (;;) {
            const double u = uniform_signed();
            const double v = uniform_signed();
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                const double r = std::sqrt(-2.0 * std::log(s) / s);
                return {u * r, v * r};
            }
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

// Compensated (Kahan) accumulator for deterministic fixed-order reductions.
class KahanSum {
public:
    void add(double x) {
        const double y = x - compensation_;
        const double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

} // namespace torusmax
