#pragma once

#include <cstdint>

#include "rwrs/special.hpp"

namespace rwrs {

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash2(uint64_t a, uint64_t b) {
    return mix64(mix64(a + 0x9e3779b97f4a7c15ULL) ^ (b + 0x632be59bd9b4e019ULL));
}

/// Uniform double in the open interval (0,1); never returns an endpoint.
inline double u64_to_unit(uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Stream tags: walk steps, scenery draws and solver initialisations never
// share a counter stream even under a common base seed.
inline constexpr uint64_t kStreamWalk = 0x57414c4bULL;
inline constexpr uint64_t kStreamScenery = 0x5343454eULL;
inline constexpr uint64_t kStreamInit = 0x494e4954ULL;

/// Key for an indexed substream (e.g. one Monte Carlo replicate).
inline uint64_t stream_key(uint64_t seed, uint64_t tag, uint64_t index) {
    return hash2(hash2(seed, tag), index);
}

/// Counter-based generator: state is (key, counter), output mix64-hashed.
/// Draws are a pure function of the key and position, so replicates are
/// reproducible independently of scheduling.
struct CounterRng {
    uint64_t key;
    uint64_t ctr = 0;

    explicit CounterRng(uint64_t k) : key(k) {}

    uint64_t next_u64() { return hash2(key, ctr++); }
    double next_unit() { return u64_to_unit(next_u64()); }
    double next_normal() { return inv_normal_cdf(next_unit()); }
};

}  // namespace rwrs
