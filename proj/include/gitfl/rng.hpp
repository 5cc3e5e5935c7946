#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gitfl {

// splitmix64 finalizer, used to derive independent sub-streams from a run seed.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

// Sub-stream keyed by (seed, tag, index). Results do not depend on which
// thread runs the consumer, only on the key.
inline Rng substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
    return Rng(mix64(mix64(mix64(seed) ^ tag) ^ index));
}

inline double next_uniform(Rng& rng) {
    // 53-bit mantissa in [0,1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller without the cached second value, so every call consumes exactly
// two raw draws regardless of history.
inline double next_normal(Rng& rng) {
    double u1 = 1.0 - next_uniform(rng);  // (0,1]
    double u2 = next_uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace gitfl
