#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file theory.hpp
 * @brief Closed-form logit thresholds and nucleus-mass formulas.
 *
 * Nucleus sampling with mass p keeps the tokens whose logit is at least some
 * threshold t. If the V logits are i.i.d. with density f, then
 *
 *     (1/V) * sum_{l_i > t} exp(l_i)  ->  I(t) = integral_t^inf e^x f(x) dx
 *
 * in probability, so the nucleus mass at threshold t tends to I(t) / I(-inf).
 * Solving I(t) / I(-inf) = p gives:
 *
 *   Gaussian N(mu, sigma^2):  t = mu + sigma^2 + sqrt(2) sigma erf_inv(1 - 2p)
 *   Uniform U(M - a, M):      t = M - ln(1 / (1 - p (1 - e^{-a})))
 *
 * For the Gaussian, completing the square gives
 *     I(t) = exp(mu + sigma^2 / 2) * Phi((mu + sigma^2 - t) / sigma).
 *
 * Substituting the top-n-sigma cutoff t = M - n sigma yields the nucleus
 * mass the rule keeps in the two limiting cases.
 */

#include <cstddef>
#include <span>

#include "topns/logit_core.hpp"

namespace topns {

struct GaussianParams {
  double mu = 0.0;
  double sigma = 1.0;  ///< > 0

  /// Throws InvalidParameter unless sigma > 0 and both fields are finite.
  void validate() const;
};

/// Logits on [upper - width, upper].
struct UniformParams {
  double upper = 0.0;
  double width = 1.0;  ///< > 0

  void validate() const;
};

struct NucleusMassReport {
  double threshold = 0.0;
  double mass = 0.0;
  std::size_t nucleus_size = 0;
};

/// Threshold whose expected nucleus mass is p under Gaussian logits. p in (0, 1), else DomainError.
double gaussian_threshold(const GaussianParams& params, double p);

/// Threshold whose expected nucleus mass is p under uniform logits. p in (0, 1), else DomainError.
double uniform_threshold(const UniformParams& params, double p);

/// Softmax mass and count of tokens with l_i >= t.
NucleusMassReport nucleus_mass_empirical(const LogitVector& l, double t);

/// I(t) for Gaussian f; t may be -inf.
double integral_I(const GaussianParams& params, double t);

/// (1/V) * sum over l_i > t of exp(l_i): the finite-V estimate of I(t).
double empirical_integral_I(std::span<const double> logits, double t);

/**
 * Nucleus mass kept by top-n-sigma when the whole logit vector is Gaussian:
 *     p = 1/2 [1 - erf((M - mu - n sigma - sigma^2) / (sqrt(2) sigma))]
 * with M - mu = sigma_distance * sigma, i.e. p = erfc((d - n - sigma) / sqrt(2)) / 2.
 */
double topnsigma_mass_gaussian(double sigma, double sigma_distance, double n);

/// The same mass parameterized by the absolute gap M - mu. Tends to 0 as sigma -> 0 for fixed gap > 0.
double topnsigma_mass_gaussian_gap(double sigma, double gap, double n);

/**
 * Lower bound on the top-n-sigma nucleus mass for uniform logits whose
 * std is sigma:  (1 - e^{-n sigma}) / (1 - e^{-2 sqrt(3) sigma}).
 * n must lie in (0, 2 sqrt(3)]; the bound reaches 1 at the upper end.
 */
double topnsigma_mass_uniform_bound(double sigma, double n);

/// Exact uniform-case mass (1 - e^{-n sigma}) / (1 - e^{-a}), clamped to 1 when n sigma >= a.
double topnsigma_mass_uniform(double sigma, double n, double width);

/// min-p cutoff in logit space: M + ln p. p in (0, 1], else DomainError.
double minp_logit_threshold(double max_logit, double p);

}  // namespace topns
