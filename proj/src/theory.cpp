// SPDX-License-Identifier: Apache-2.0

#include "topns/theory.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "topns/error.hpp"
#include "topns/samplers.hpp"
#include "topns/special_functions.hpp"

namespace topns {

namespace {

void check_open_unit(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(what) + " requires p in (0, 1)");
}

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
}

}  // namespace

void GaussianParams::validate() const {
  if (!std::isfinite(mu)) throw InvalidParameter("gaussian mu must be finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidParameter("gaussian sigma must be positive");
}

void UniformParams::validate() const {
  if (!std::isfinite(upper)) throw InvalidParameter("uniform upper bound must be finite");
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidParameter("uniform width must be positive");
}

double gaussian_threshold(const GaussianParams& params, double p) {
  params.validate();
  check_open_unit(p, "gaussian_threshold");
  const double s = params.sigma;
  return params.mu + std::numbers::sqrt2 * s * math::erf_inv(1.0 - 2.0 * p) + s * s;
}

double uniform_threshold(const UniformParams& params, double p) {
  params.validate();
  check_open_unit(p, "uniform_threshold");
  // 1 - p (1 - e^{-a}); -expm1(-a) keeps precision for small widths
  const double inner = 1.0 - p * -std::expm1(-params.width);
  if (!(inner > 0.0)) throw NumericError("uniform_threshold: non-positive logarithm argument");
  return params.upper + std::log(inner);
}

NucleusMassReport nucleus_mass_empirical(const LogitVector& l, double t) {
  const ProbVector probs = softmax_stable(l);
  NucleusMassReport r;
  r.threshold = t;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] >= t) {
      r.mass += probs[i];
      ++r.nucleus_size;
    }
  }
  r.mass = std::min(r.mass, 1.0);
  return r;
}

double integral_I(const GaussianParams& params, double t) {
  params.validate();
  const double m = params.mu;
  const double s = params.sigma;
  const double scale = std::exp(m + 0.5 * s * s);
  if (t == kNegInf) return scale;
  return scale * math::normal_cdf((m + s * s - t) / s);
}

double empirical_integral_I(std::span<const double> logits, double t) {
  if (logits.empty()) throw DegenerateInput("empirical_integral_I of an empty sample");
  double sum = 0.0;
  for (double x : logits)
    if (x > t) sum += std::exp(x);
  return sum / static_cast<double>(logits.size());
}

double topnsigma_mass_gaussian(double sigma, double sigma_distance, double n) {
  check_sigma(sigma);
  return 0.5 * math::erfc((sigma_distance - n - sigma) / std::numbers::sqrt2);
}

double topnsigma_mass_gaussian_gap(double sigma, double gap, double n) {
  check_sigma(sigma);
  return 0.5 * math::erfc((gap - n * sigma - sigma * sigma) / (std::numbers::sqrt2 * sigma));
}

double topnsigma_mass_uniform_bound(double sigma, double n) {
  check_sigma(sigma);
  if (!(n > 0.0 && n <= kTopNSigmaMaxN)) throw DomainError("uniform bound requires n in (0, 2*sqrt(3)]");
  if (n == kTopNSigmaMaxN) return 1.0;
  return std::expm1(-n * sigma) / std::expm1(-kTopNSigmaMaxN * sigma);
}

double topnsigma_mass_uniform(double sigma, double n, double width) {
  check_sigma(sigma);
  if (!(n > 0.0)) throw DomainError("n must be positive");
  if (!(width > 0.0)) throw DomainError("uniform width must be positive");
  if (n * sigma >= width) return 1.0;
  return std::expm1(-n * sigma) / std::expm1(-width);
}

double minp_logit_threshold(double max_logit, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("min-p threshold requires p in (0, 1]");
  return max_logit + std::log(p);
}

}  // namespace topns
