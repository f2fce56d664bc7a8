#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

// Counter-based Gaussian streams. A draw is a pure function of (key, counter),
// so ensembles are reproducible and independent of evaluation order or thread
// assignment. SplitMix64 finalization + Box-Muller; statistical quality only,
// not cryptographic.

namespace qgibbs::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Key {
    std::uint64_t v = 0;
    /// Derive an independent substream (per ensemble member, per purpose).
    Key child(std::uint64_t tag) const { return {splitmix64(v ^ splitmix64(tag ^ 0xA24BAED4963EE407ULL))}; }
};

struct GaussPair {
    double z0 = 0.0, z1 = 0.0;
};

/// Two independent N(0,1) draws for (key, counter).
inline GaussPair gaussian_pair(Key key, std::uint64_t counter) {
    const std::uint64_t h1 = splitmix64(key.v ^ splitmix64(counter ^ 0x9FB21C651E98DF25ULL));
    const std::uint64_t h2 = splitmix64(h1 ^ 0xD1B54A32D192ED03ULL);
    const double u1 = ((h1 >> 11) + 1) * 0x1.0p-53;  // (0,1]: log stays finite
    const double u2 = (h2 >> 11) * 0x1.0p-53;        // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

inline double gaussian(Key key, std::uint64_t counter) { return gaussian_pair(key, counter).z0; }

}  // namespace qgibbs::rng
