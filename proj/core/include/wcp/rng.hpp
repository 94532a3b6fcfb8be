#pragma once

#include <cmath>
#include <cstdint>

namespace wcp {

// splitmix64 finalizer; bijective on 64-bit values.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-replica seed stream. Injective in `replica` for a fixed global seed
// (composition of bijections), and never the identity passthrough.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::uint64_t replica) {
    return mix64(global_seed ^ mix64(replica ^ 0xD1B54A32D192ED03ULL));
}

// xoshiro256++ by Blackman & Vigna. All stochastic code in this project
// draws from this generator so that results are reproducible from a seed
// alone, independent of platform library details.
class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed) {
        // splitmix64 stream expansion of the seed, as recommended by the authors
        std::uint64_t sm = seed;
        for (auto& word : s_) {
            sm += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = sm;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]; safe as a log() argument
    double next_double_pos() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Exponential(rate) via inverse transform of a 64-bit uniform.
    double exponential(double rate) { return -std::log(next_double_pos()) / rate; }

    // uniform integer in [0, bound), Lemire's method with rejection (unbiased)
    std::uint64_t bounded(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = -bound % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace wcp
