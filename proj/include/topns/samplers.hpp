#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file samplers.hpp
 * @brief Truncation samplers over raw logits.
 *
 * Every strategy is split into a mask step (which tokens form the nucleus)
 * and a shared step that sets excluded logits to -inf, applies softmax and
 * draws one token by inverse CDF. All comparisons are inclusive (>=) and ties
 * are broken toward the lower token index.
 *
 * Top-n-sigma keeps token i iff l'_i >= max(l') - n * std(l') with l' = l / T.
 * Scaling by T scales max and std alike, so the nucleus does not depend on T.
 */

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topns/logit_core.hpp"

namespace topns {

enum class SamplerKind { kGreedy, kTemperature, kTopK, kTopP, kMinP, kTopNSigma };

/// Upper bound on n for top-n-sigma: 2*sqrt(3).
inline constexpr double kTopNSigmaMaxN = 3.4641016151377545870548926830117447;
/// Below this n the nucleus may drop informative tokens; accepted with a warning.
inline constexpr double kTopNSigmaSoftMinN = 0.5;

std::string_view to_string(SamplerKind kind);
/// Accepts greedy, temperature, top_k, top_p, min_p, top_n_sigma. Throws InvalidParameter otherwise.
SamplerKind parse_sampler_kind(std::string_view name);

/**
 * A configured decoding strategy. Exactly the parameter belonging to `kind`
 * is set: `k` for top_k, `p` for top_p and min_p, `n` for top_n_sigma.
 */
struct SamplerSpec {
  SamplerKind kind = SamplerKind::kGreedy;
  double temperature = 1.0;
  std::optional<std::size_t> k;
  std::optional<double> p;
  std::optional<double> n;

  static SamplerSpec greedy();
  static SamplerSpec plain(double temperature = 1.0);
  static SamplerSpec top_k(std::size_t k, double temperature = 1.0);
  static SamplerSpec top_p(double p, double temperature = 1.0);
  static SamplerSpec min_p(double p, double temperature = 1.0);
  static SamplerSpec top_n_sigma(double n, double temperature = 1.0);

  /// Throws InvalidParameter on a missing, extra or out-of-range parameter.
  void validate() const;
  /// Soft diagnostics for a valid spec (currently: top_n_sigma with n < 0.5).
  std::vector<std::string> warnings() const;

  /// Same spec with a different temperature.
  SamplerSpec with_temperature(double t) const;

  /// Compact label, e.g. "top_n_sigma(n=1)".
  std::string label() const;

  bool operator==(const SamplerSpec&) const = default;
};

/**
 * Parses "kind" or "kind:key=value[,key=value]" where key is one of
 * k, p, n, t. Missing parameters fall back to the recommended settings
 * (k=20, top_p p=0.9, min_p p=0.1, n=1.0).
 */
SamplerSpec parse_sampler_spec(std::string_view text);

/**
 * Top-n-sigma nucleus of l / T: l'_i >= max(l') - n * std(l'), std over the
 * finite entries. The set does not depend on T, so it is evaluated on l
 * directly and is bit-identical for every valid T. Needs >= 2 finite logits;
 * n in (0, 2*sqrt(3)).
 */
NucleusMask mask_top_nsigma(const LogitVector& l, double temperature, double n);

/// The k largest finite logits (stable on ties); all finite ones when k exceeds their count.
NucleusMask mask_top_k(const LogitVector& l, std::size_t k);

/// Smallest prefix of softmax(l / T), sorted descending, whose mass reaches p (crossing token kept).
NucleusMask mask_top_p(const LogitVector& l, double temperature, double p);
/// Same rule on an explicit probability vector.
NucleusMask mask_top_p(const ProbVector& probs, double p);

/// Tokens with softmax(l / T)_i >= p * max_j softmax(l / T)_j, evaluated as l'_i >= max(l') + ln p.
NucleusMask mask_min_p(const LogitVector& l, double temperature, double p);
/// Same rule on an explicit probability vector.
NucleusMask mask_min_p(const ProbVector& probs, double p);

/// Nucleus of `spec` on l (temperature applied as in sampling). Greedy yields the argmax alone.
NucleusMask build_mask(const LogitVector& l, const SamplerSpec& spec);

/// Renormalized distribution a non-greedy `spec` samples from.
ProbVector sampling_distribution(const LogitVector& l, const SamplerSpec& spec);

/// One token drawn according to `spec`. Greedy ignores `rng`.
TokenId sample(const LogitVector& l, const SamplerSpec& spec, Rng& rng);

}  // namespace topns
