#pragma once

#include <cstdint>

namespace grownet {

// SplitMix64 (Steele, Lea & Flood; the stream generator behind Java's
// SplittableRandom). Chosen as the project RNG because its output is a pure
// function of the 64-bit state, so streams are portable across platforms and
// compilers. All randomness in the toolkit flows from a user seed through
// split_stream(), which keys an independent stream per simulation step /
// bootstrap replicate; replicates can therefore run in any order (or in
// parallel) and still reproduce bit-identical results.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random mantissa bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) via 128-bit multiply-shift. The modulo bias is
  // at most n / 2^64 and, unlike rejection sampling, the draw count per call
  // is fixed, which keeps streams aligned across platforms.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  uint64_t state_;
};

// Derives the state for sub-stream `stream` of `seed` (one SplitMix64
// scramble of the pair).
inline uint64_t split_stream(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace grownet
