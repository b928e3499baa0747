#pragma once

// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <random>

namespace topns {

/**
 * Seedable, reproducible random source.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The conversions to uniform and normal variates are implemented
 * here rather than through <random> distributions, which are
 * implementation-defined, so a given seed yields the same draws with every
 * standard library.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate (Marsaglia polar method).
  double normal();

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent child seeds from (seed, index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace topns
