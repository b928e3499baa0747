#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file synth.hpp
 * @brief Seeded two-region logit model: a Gaussian noisy bulk plus a few
 *        informative tokens near the maximum.
 *
 * Layout: the informative tokens occupy indices 0 .. k-1 (k = number of
 * offsets), in offset order; the noise tokens fill k .. V-1. Noise draws at
 * or above the lowest informative logit are rejected and redrawn, so the
 * informative tokens are always the top-k logits and token 0 is the argmax.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "topns/logit_core.hpp"
#include "topns/rng.hpp"
#include "topns/theory.hpp"

namespace topns {

struct MixtureSpec {
  std::size_t vocab_size = 1000;
  GaussianParams noise{};
  /// Gaps below the max; offsets[0] == 0 and nondecreasing.
  std::vector<double> informative_offsets{0.0};
  double target_max = 10.0;
  std::uint64_t seed = 0;
  /**
   * When set, informative tokens 1 .. k-1 are drawn uniformly from
   * [target_max - width, target_max] instead of sitting at the fixed offsets.
   */
  std::optional<double> uniform_width;

  std::size_t informative_count() const noexcept { return informative_offsets.size(); }

  /// Throws InvalidParameter on any violated invariant.
  void validate() const;
};

/// One logit vector from the mixture (deterministic in spec.seed).
LogitVector generate(const MixtureSpec& spec);

/**
 * One vector per step with the max adjusted so the realized sigma-distance
 * matches `sigma_distance_schedule[step]` (solved by bisection, well inside
 * +-0.5). Informative tokens keep fixed relative heights above the noise
 * mean: token j sits at mu + (M - mu) * (1 - offset_j / (target_max - mu)),
 * which is exactly the offset layout when M == target_max. Raising the max
 * therefore widens the gaps and shrinks the top-n-sigma nucleus.
 *
 * Throws InvalidParameter if the schedule length differs from `steps`, if a
 * value is below 1, or if a value cannot be reached at this vocabulary size.
 */
std::vector<LogitVector> generate_sequence(const MixtureSpec& spec, std::size_t steps,
                                           std::span<const double> sigma_distance_schedule);

/// V i.i.d. draws from N(mu, sigma^2).
std::vector<double> gaussian_logits(std::size_t count, const GaussianParams& params, Rng& rng);

/// V i.i.d. draws from U(upper - width, upper).
std::vector<double> uniform_logits(std::size_t count, const UniformParams& params, Rng& rng);

/// Linearly spaced schedule from `first` to `last` inclusive.
std::vector<double> linear_schedule(double first, double last, std::size_t steps);

}  // namespace topns
