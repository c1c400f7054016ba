#pragma once

#include <cmath>
#include <cstdint>

namespace spe {

// Portable pseudo-random generators, fully specified so that seeds reproduce
// across implementations: splitmix64 (Steele, Lea, Flood 2014) for state
// expansion, xoshiro256++ 1.0 (Blackman, Vigna 2019) for the stream.
// Distributions are derived by inversion only; no library distribution
// objects are used anywhere on the simulation path.

struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class Xoshiro256pp {
public:
    /// Expands the seed into the four state words via splitmix64.
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& word : state_) word = sm.next();
    }

    std::uint64_t next() {
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

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Exponential with the given mean, by inversion. mean == 0 yields 0.
    double exponential(double mean) {
        if (mean <= 0.0) return 0.0;
        return -mean * std::log1p(-uniform01());
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace spe
