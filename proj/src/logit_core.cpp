// SPDX-License-Identifier: Apache-2.0

#include "topns/logit_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topns/error.hpp"

namespace topns {

LogitVector::LogitVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidParameter("logit vector must have at least one entry");
  bool any_finite = false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (std::isnan(v)) throw InvalidParameter("logit " + std::to_string(i) + " is NaN");
    if (v == std::numeric_limits<double>::infinity())
      throw InvalidParameter("logit " + std::to_string(i) + " is +inf");
    any_finite = any_finite || std::isfinite(v);
  }
  if (!any_finite) throw DegenerateInput("logit vector has no finite entry");
}

std::size_t LogitVector::finite_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }));
}

ProbVector::ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double q = probs_[i];
    if (!(q >= 0.0 && q <= 1.0))
      throw InvalidParameter("probability " + std::to_string(i) + " outside [0, 1]");
    sum += q;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw InvalidParameter("probabilities sum to " + std::to_string(sum) + ", expected 1");
}

NucleusMask::NucleusMask(std::vector<bool> included)
    : included_(std::move(included)),
      size_(static_cast<std::size_t>(std::count(included_.begin(), included_.end(), true))) {}

NucleusMask NucleusMask::all_finite(const LogitVector& l) {
  std::vector<bool> inc(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) inc[i] = std::isfinite(l[i]);
  return NucleusMask(std::move(inc));
}

std::vector<TokenId> NucleusMask::indices() const {
  std::vector<TokenId> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < included_.size(); ++i)
    if (included_[i]) out.push_back(i);
  return out;
}

LogitVector temperature_scale(const LogitVector& l, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidParameter("temperature must be positive and finite");
  std::vector<double> out(l.begin(), l.end());
  for (double& v : out)
    if (std::isfinite(v)) v /= temperature;
  return LogitVector(std::move(out));
}

namespace {

double max_finite(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v)
    if (std::isfinite(x) && x > m) m = x;
  return m;
}

}  // namespace

ProbVector softmax_stable(const LogitVector& l) {
  const double m = max_finite(l.values());
  if (!std::isfinite(m)) throw DegenerateInput("softmax of a vector with no finite entry");
  std::vector<double> p(l.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    p[i] = std::isfinite(l[i]) ? std::exp(l[i] - m) : 0.0;
    sum += p[i];
  }
  for (double& q : p) q /= sum;
  return ProbVector(std::move(p));
}

LogitStats compute_stats(const LogitVector& l) {
  std::size_t count = 0;
  double sum = 0.0;
  double mx = kNegInf;
  double mn = std::numeric_limits<double>::infinity();
  for (double v : l) {
    if (!std::isfinite(v)) continue;
    ++count;
    sum += v;
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  if (count < 2) throw DegenerateInput("statistics need at least 2 finite logits");

  LogitStats s;
  s.max = mx;
  if (mx == mn) {
    s.mean = mx;
    return s;
  }
  const double n = static_cast<double>(count);
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : l) {
    if (!std::isfinite(v)) continue;
    const double d = v - s.mean;
    ss += d * d;
  }
  s.std = std::sqrt(ss / n);
  s.sigma_distance = s.std > 0.0 ? std::max(0.0, (s.max - s.mean) / s.std) : 0.0;
  return s;
}

TokenId argmax(const LogitVector& l) {
  TokenId best = 0;
  double best_v = kNegInf;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (std::isfinite(l[i]) && l[i] > best_v) {
      best_v = l[i];
      best = i;
    }
  }
  return best;
}

LogitVector apply_mask(const LogitVector& l, const NucleusMask& mask) {
  if (mask.length() != l.size()) throw InvalidParameter("mask length does not match logit vector");
  std::vector<double> out(l.begin(), l.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!mask.contains(i)) out[i] = kNegInf;
  return LogitVector(std::move(out));
}

TokenId categorical_sample(const ProbVector& p, Rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  TokenId last_nonzero = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    cum += p[i];
    last_nonzero = i;
    if (u < cum) return i;
  }
  // cumulative sum fell short of u through rounding
  return last_nonzero;
}

CumulativeTable::CumulativeTable(const ProbVector& p) : cum_(p.size()) {
  double cum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      cum += p[i];
      last_nonzero_ = i;
    }
    cum_[i] = cum;
  }
}

TokenId CumulativeTable::draw(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
  if (it == cum_.end()) return last_nonzero_;
  return static_cast<TokenId>(it - cum_.begin());
}

}  // namespace topns
