#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file logit_core.hpp
 * @brief Logit/probability vector types and the numerically stable primitives
 *        every sampler and analysis builds on.
 *
 * Conventions:
 * - Logits are natural-log scale doubles. -inf marks a token that is already
 *   excluded; NaN and +inf are rejected at construction.
 * - Statistics (max, mean, std) are taken over finite entries only. The
 *   standard deviation is the population one (divide by the count).
 */

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "topns/rng.hpp"

namespace topns {

using TokenId = std::size_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Pre-softmax scores for one decoding step.
class LogitVector {
 public:
  /// Throws InvalidParameter if empty, if any entry is NaN or +inf, or if no entry is finite.
  explicit LogitVector(std::vector<double> values);
  LogitVector(std::initializer_list<double> values) : LogitVector(std::vector<double>(values)) {}

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  std::size_t finite_count() const noexcept;

  bool operator==(const LogitVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Softmax output. Entries in [0, 1] summing to 1 within 1e-9.
class ProbVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Throws InvalidParameter if any entry is outside [0, 1] or the sum is off by more than 1e-9.
  explicit ProbVector(std::vector<double> probs);
  ProbVector(std::initializer_list<double> probs) : ProbVector(std::vector<double>(probs)) {}

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

struct LogitStats {
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;             ///< population standard deviation
  double sigma_distance = 0.0;  ///< (max - mean) / std, 0 when std == 0
};

/// Membership of each token in a sampling nucleus.
class NucleusMask {
 public:
  NucleusMask() = default;
  explicit NucleusMask(std::vector<bool> included);

  /// Every finite entry of `l` included.
  static NucleusMask all_finite(const LogitVector& l);

  bool contains(TokenId i) const { return included_[i]; }
  /// Number of included tokens.
  std::size_t size() const noexcept { return size_; }
  /// Vocabulary length.
  std::size_t length() const noexcept { return included_.size(); }
  const std::vector<bool>& included() const noexcept { return included_; }
  std::vector<TokenId> indices() const;

  bool operator==(const NucleusMask&) const = default;

 private:
  std::vector<bool> included_;
  std::size_t size_ = 0;
};

/// Divides every finite entry by T. Throws InvalidParameter unless T > 0 and finite.
LogitVector temperature_scale(const LogitVector& l, double temperature);

/// p_i = exp(l_i - M) / sum_j exp(l_j - M), M the max finite logit; -inf maps to exactly 0.
ProbVector softmax_stable(const LogitVector& l);

/// Max/mean/population-std over finite entries. Throws DegenerateInput with fewer than 2 finite entries.
LogitStats compute_stats(const LogitVector& l);

/// Largest finite logit, lowest index on ties.
TokenId argmax(const LogitVector& l);

/// Excluded entries set to -inf. Throws InvalidParameter on length mismatch, DegenerateInput if no finite entry survives.
LogitVector apply_mask(const LogitVector& l, const NucleusMask& mask);

/**
 * Inverse-CDF draw from `p` using a single uniform variate. Zero-probability
 * entries are never returned.
 */
TokenId categorical_sample(const ProbVector& p, Rng& rng);

/**
 * Precomputed cumulative sums of one distribution for repeated draws.
 * `draw` returns exactly what categorical_sample would for the same uniform
 * variate, in O(log V).
 */
class CumulativeTable {
 public:
  explicit CumulativeTable(const ProbVector& p);

  TokenId draw(Rng& rng) const;

 private:
  std::vector<double> cum_;
  TokenId last_nonzero_ = 0;
};

}  // namespace topns
