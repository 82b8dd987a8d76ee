#pragma once

#include <cstdint>
#include <random>

namespace adelic {

/**
 * Seeded random stream with deterministic splitting.
 *
 * A stream is owned by one caller at a time. Parallel work derives one child
 * per worker with split(i); children depend only on (seed, i), so ensembles
 * are reproducible for a fixed worker count.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    RandomStream split(std::uint64_t index) const {
        return RandomStream(mix(seed_ ^ mix(index + 0x9e3779b97f4a7c15ULL)));
    }

    // Uniform integer on [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
    }

    // Uniform double on [0, 1).
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

    double exponential() { return std::exponential_distribution<double>(1.0)(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace adelic
