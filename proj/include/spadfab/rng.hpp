// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace spadfab {

/// Stafford mix13 finalizer; the avalanche stage of SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

/// Counter-based per-stream random generator.
///
/// Output i is mix64(key + (i+1)*GAMMA) where key derives from
/// (seed, stream_id, salt) alone, so streams are independent of the order
/// in which they are generated and identical across runs and platforms.
/// All distributions are implemented explicitly on top of the raw 64-bit
/// output; nothing is delegated to implementation-defined std::
/// distributions.
class StreamRng {
public:
  StreamRng(std::uint64_t seed, std::uint64_t stream_id,
            std::uint64_t salt = 0)
      : key_(mix64(seed + kGamma * mix64(stream_id + kGamma * mix64(salt)))) {}

  std::uint64_t next_u64() { return mix64(key_ + ++counter_ * kGamma); }

  /// Uniform double in (0, 1]; never 0, safe as a log() argument.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Exponential with the given mean.
  double next_exp(double mean) { return -mean * std::log(next_unit()); }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching,
  /// so consumption is a pure function of the draw count).
  double next_gauss() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925287 * u2);
  }

  /// Poisson count with the given mean: the number of unit-rate exponential
  /// interarrivals that fit in [0, mean]. Exact for any mean; the spad
  /// streams only use modest means so the O(mean) cost is irrelevant.
  std::uint64_t next_poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::uint64_t k = 0;
    double acc = -std::log(next_unit());
    while (acc <= mean) {
      ++k;
      acc -= std::log(next_unit());
    }
    return k;
  }

private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace spadfab
