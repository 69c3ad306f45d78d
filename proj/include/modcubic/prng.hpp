#pragma once

// Counter-based deterministic randomness for scans. The full algorithm, so
// that any language can reproduce the streams bit for bit:
//
//   mix64(z):  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
//              z ^= z >> 27;  z *= 0x94D049BB133111EB
//              z ^= z >> 31;  return z            (64-bit wrapping)
//
//   SplitMix64 step: state += 0x9E3779B97F4A7C15; output mix64(state)
//
//   stream state for a work unit (seed, key1, key2):
//              mix64(mix64(mix64(seed + 0x9E3779B97F4A7C15) ^ key1) ^ key2)
//
// Work-unit keys: key1 is the prime p; key2 is (purpose << 32) | index with
// purpose 0 for curve-coefficient streams and 1 for random-family streams.
// A coefficient stream draws a = 1 + next() % (p-1) first, then
// c = next() % p.

#include <cstdint>
#include <utility>

namespace modcubic {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        state += kGolden;
        return mix64(state);
    }
};

inline std::uint64_t stream_state(std::uint64_t seed, std::uint64_t key1,
                                  std::uint64_t key2) {
    return mix64(mix64(mix64(seed + kGolden) ^ key1) ^ key2);
}

inline constexpr std::uint64_t kStreamCurve = 0;
inline constexpr std::uint64_t kStreamFamily = 1;

inline SplitMix64 curve_stream(std::uint64_t seed, std::uint64_t p,
                               std::uint64_t index) {
    return SplitMix64{stream_state(seed, p, (kStreamCurve << 32) | index)};
}

inline SplitMix64 family_stream(std::uint64_t seed, std::uint64_t p,
                                std::uint64_t index) {
    return SplitMix64{stream_state(seed, p, (kStreamFamily << 32) | index)};
}

// (a, c) with a uniform in [1, p-1] and c uniform in [0, p-1]; draw order
// is part of the documented stream contract.
inline std::pair<std::uint64_t, std::uint64_t> sample_coefficients(
    SplitMix64& rng, std::uint64_t p) {
    const std::uint64_t a = 1 + rng.next() % (p - 1);
    const std::uint64_t c = rng.next() % p;
    return {a, c};
}

}  // namespace modcubic
