// This file is part of drmdp, a solver library for distributionally robust
// Markov decision processes with discounted and average-reward objectives.
//
// SPDX-License-Identifier: MIT

#pragma once

#include <cmath>
#include <cstdint>

namespace drmdp {

/// 64-bit seed for all randomized operations. Identical seeds yield
/// identical sample streams.
struct RngSeed {
  std::uint64_t seed = 0;
};

namespace rng {

/// SplitMix64 finalizer: a bijective 64-bit mixer with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream purposes keep draws for unrelated uses statistically independent
/// even when they share (seed, s, a) keys.
enum : std::uint64_t {
  kPurposeSampling = 0xA5A5A5A5'00000001ULL,
  kPurposeInstance = 0xA5A5A5A5'00000002ULL,
  kPurposeTesting = 0xA5A5A5A5'00000003ULL,
};

/// A splittable counter-based random stream (SplitMix64 sequence). Streams
/// are keyed by (seed, purpose, s, a): every (s, a) pair owns an independent
/// substream, so per-pair draws never depend on evaluation order and
/// parallel sampling is bit-identical to sequential sampling.
class Stream {
 public:
  explicit Stream(std::uint64_t state) : state_(state) {}

  static Stream keyed(std::uint64_t seed, std::uint64_t purpose,
                      std::uint64_t s, std::uint64_t a) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(purpose));
    h = mix64(h ^ mix64(s + 0x9E3779B97F4A7C15ULL));
    h = mix64(h ^ mix64(a + 0xC2B2AE3D27D4EB4FULL));
    return Stream(h);
  }

  std::uint64_t next_u64() { return mix64(state_ += 0x9E3779B97F4A7C15ULL); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Box–Muller transform; one pair of uniforms per variate (the sine branch
  /// is discarded to keep the stream position independent of call parity).
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return mean + stddev * r * std::cos(two_pi * u2);
  }

  /// Single categorical draw by inverse-CDF over a probability vector.
  int categorical(const double* p, int size) {
    const double u = next_unit();
    double cum = 0.0;
    for (int i = 0; i < size; ++i) {
      cum += p[i];
      if (u < cum) return i;
    }
    // Roundoff may leave cum slightly below 1; attribute the sliver to the
    // last state with positive mass.
    for (int i = size - 1; i >= 0; --i) {
      if (p[i] > 0.0) return i;
    }
    return size - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace rng
}  // namespace drmdp
