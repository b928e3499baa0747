// SPDX-License-Identifier: Apache-2.0

#include "topns/samplers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "topns/error.hpp"

namespace topns {

namespace {

void check_n(double n) {
  if (!(n > 0.0 && n < kTopNSigmaMaxN))
    throw InvalidParameter("top_n_sigma n must lie in (0, 2*sqrt(3)), got " + std::to_string(n));
}

void check_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("temperature must be positive and finite");
}

void check_p(double p, const char* what) {
  if (!(p > 0.0 && p <= 1.0))
    throw InvalidParameter(std::string(what) + " p must lie in (0, 1], got " + std::to_string(p));
}

// Scaling by 1/T moves max and std together, so the nucleus is evaluated on
// the unscaled logits: identical in exact arithmetic, and immune to rounding
// that could move a boundary token across the cutoff.
NucleusMask nsigma_unscaled(const LogitVector& l, double n) {
  const LogitStats s = compute_stats(l);
  const double cutoff = s.max - n * s.std;
  std::vector<bool> inc(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) inc[i] = std::isfinite(l[i]) && l[i] >= cutoff;
  return NucleusMask(std::move(inc));
}

NucleusMask min_p_on_scaled(const LogitVector& scaled, double p) {
  const double cutoff = scaled[argmax(scaled)] + std::log(p);
  std::vector<bool> inc(scaled.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) inc[i] = std::isfinite(scaled[i]) && scaled[i] >= cutoff;
  return NucleusMask(std::move(inc));
}

NucleusMask top_p_on_probs(std::span<const double> probs, double p) {
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  std::vector<bool> inc(probs.size());
  double cum = 0.0;
  for (std::size_t idx : order) {
    if (probs[idx] <= 0.0) break;
    inc[idx] = true;
    cum += probs[idx];
    if (cum >= p) break;
  }
  return NucleusMask(std::move(inc));
}

struct PreparedStep {
  LogitVector scaled;
  NucleusMask mask;
};

PreparedStep prepare(const LogitVector& l, const SamplerSpec& spec) {
  spec.validate();
  LogitVector scaled = spec.kind == SamplerKind::kGreedy ? l : temperature_scale(l, spec.temperature);
  NucleusMask mask;
  switch (spec.kind) {
    case SamplerKind::kGreedy: {
      std::vector<bool> inc(l.size());
      inc[argmax(l)] = true;
      mask = NucleusMask(std::move(inc));
      break;
    }
    case SamplerKind::kTemperature:
      mask = NucleusMask::all_finite(scaled);
      break;
    case SamplerKind::kTopK:
      // ranks are order-invariant; scaling could only merge distinct values into ties
      mask = mask_top_k(l, *spec.k);
      break;
    case SamplerKind::kTopP:
      mask = top_p_on_probs(softmax_stable(scaled).probs(), *spec.p);
      break;
    case SamplerKind::kMinP:
      mask = min_p_on_scaled(scaled, *spec.p);
      break;
    case SamplerKind::kTopNSigma:
      mask = nsigma_unscaled(l, *spec.n);
      break;
  }
  return {std::move(scaled), std::move(mask)};
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kGreedy: return "greedy";
    case SamplerKind::kTemperature: return "temperature";
    case SamplerKind::kTopK: return "top_k";
    case SamplerKind::kTopP: return "top_p";
    case SamplerKind::kMinP: return "min_p";
    case SamplerKind::kTopNSigma: return "top_n_sigma";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (SamplerKind k : {SamplerKind::kGreedy, SamplerKind::kTemperature, SamplerKind::kTopK, SamplerKind::kTopP,
                        SamplerKind::kMinP, SamplerKind::kTopNSigma}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParameter("unknown sampler kind '" + std::string(name) + "'");
}

SamplerSpec SamplerSpec::greedy() { return {}; }

SamplerSpec SamplerSpec::plain(double temperature) {
  SamplerSpec s;
  s.kind = SamplerKind::kTemperature;
  s.temperature = temperature;
  return s;
}

SamplerSpec SamplerSpec::top_k(std::size_t k, double temperature) {
  SamplerSpec s = plain(temperature);
  s.kind = SamplerKind::kTopK;
  s.k = k;
  return s;
}

SamplerSpec SamplerSpec::top_p(double p, double temperature) {
  SamplerSpec s = plain(temperature);
  s.kind = SamplerKind::kTopP;
  s.p = p;
  return s;
}

SamplerSpec SamplerSpec::min_p(double p, double temperature) {
  SamplerSpec s = plain(temperature);
  s.kind = SamplerKind::kMinP;
  s.p = p;
  return s;
}

SamplerSpec SamplerSpec::top_n_sigma(double n, double temperature) {
  SamplerSpec s = plain(temperature);
  s.kind = SamplerKind::kTopNSigma;
  s.n = n;
  return s;
}

void SamplerSpec::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidParameter("temperature must be positive and finite");
  const bool wants_k = kind == SamplerKind::kTopK;
  const bool wants_p = kind == SamplerKind::kTopP || kind == SamplerKind::kMinP;
  const bool wants_n = kind == SamplerKind::kTopNSigma;
  const std::string name(to_string(kind));
  if (k.has_value() != wants_k)
    throw InvalidParameter(name + (wants_k ? " requires k" : " does not take k"));
  if (p.has_value() != wants_p)
    throw InvalidParameter(name + (wants_p ? " requires p" : " does not take p"));
  if (n.has_value() != wants_n)
    throw InvalidParameter(name + (wants_n ? " requires n" : " does not take n"));
  if (wants_k && *k == 0) throw InvalidParameter("top_k k must be at least 1");
  if (wants_p) check_p(*p, name.c_str());
  if (wants_n) check_n(*n);
}

std::vector<std::string> SamplerSpec::warnings() const {
  std::vector<std::string> out;
  if (kind == SamplerKind::kTopNSigma && n && *n < kTopNSigmaSoftMinN)
    out.push_back("top_n_sigma n < 0.5 may exclude informative tokens");
  return out;
}

SamplerSpec SamplerSpec::with_temperature(double t) const {
  SamplerSpec s = *this;
  s.temperature = t;
  return s;
}

std::string SamplerSpec::label() const {
  std::ostringstream os;
  os << to_string(kind);
  if (k) os << "(k=" << *k << ")";
  if (p) os << "(p=" << *p << ")";
  if (n) os << "(n=" << *n << ")";
  return os.str();
}

SamplerSpec parse_sampler_spec(std::string_view text) {
  const auto colon = text.find(':');
  SamplerSpec s;
  s.kind = parse_sampler_kind(text.substr(0, colon));
  switch (s.kind) {
    case SamplerKind::kTopK: s.k = 20; break;
    case SamplerKind::kTopP: s.p = 0.9; break;
    case SamplerKind::kMinP: s.p = 0.1; break;
    case SamplerKind::kTopNSigma: s.n = 1.0; break;
    default: break;
  }
  if (colon == std::string_view::npos) return s;

  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw InvalidParameter("sampler parameter '" + std::string(item) + "' is not key=value");
    const std::string key(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
      throw InvalidParameter("sampler parameter '" + key + "' has non-numeric value '" + value + "'");
    if (key == "t") {
      s.temperature = v;
    } else if (key == "k") {
      if (s.kind != SamplerKind::kTopK) throw InvalidParameter(std::string(to_string(s.kind)) + " does not take k");
      if (v < 0 || v != std::floor(v)) throw InvalidParameter("k must be a non-negative integer");
      s.k = static_cast<std::size_t>(v);
    } else if (key == "p") {
      if (!s.p) throw InvalidParameter(std::string(to_string(s.kind)) + " does not take p");
      s.p = v;
    } else if (key == "n") {
      if (!s.n) throw InvalidParameter(std::string(to_string(s.kind)) + " does not take n");
      s.n = v;
    } else {
      throw InvalidParameter("unknown sampler parameter '" + key + "'");
    }
  }
  s.validate();
  return s;
}

NucleusMask mask_top_nsigma(const LogitVector& l, double temperature, double n) {
  check_n(n);
  check_temperature(temperature);
  return nsigma_unscaled(l, n);
}

NucleusMask mask_top_k(const LogitVector& l, std::size_t k) {
  if (k == 0) throw InvalidParameter("top_k k must be at least 1");
  std::vector<std::size_t> finite;
  finite.reserve(l.size());
  for (std::size_t i = 0; i < l.size(); ++i)
    if (std::isfinite(l[i])) finite.push_back(i);
  const std::size_t keep = std::min(k, finite.size());
  std::partial_sort(finite.begin(), finite.begin() + static_cast<std::ptrdiff_t>(keep), finite.end(),
                    [&](std::size_t a, std::size_t b) { return l[a] > l[b] || (l[a] == l[b] && a < b); });
  std::vector<bool> inc(l.size());
  for (std::size_t j = 0; j < keep; ++j) inc[finite[j]] = true;
  return NucleusMask(std::move(inc));
}

NucleusMask mask_top_p(const LogitVector& l, double temperature, double p) {
  check_p(p, "top_p");
  return top_p_on_probs(softmax_stable(temperature_scale(l, temperature)).probs(), p);
}

NucleusMask mask_top_p(const ProbVector& probs, double p) {
  check_p(p, "top_p");
  return top_p_on_probs(probs.probs(), p);
}

NucleusMask mask_min_p(const LogitVector& l, double temperature, double p) {
  check_p(p, "min_p");
  return min_p_on_scaled(temperature_scale(l, temperature), p);
}

NucleusMask mask_min_p(const ProbVector& probs, double p) {
  check_p(p, "min_p");
  const auto q = probs.probs();
  const double cutoff = p * *std::max_element(q.begin(), q.end());
  std::vector<bool> inc(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) inc[i] = q[i] > 0.0 && q[i] >= cutoff;
  return NucleusMask(std::move(inc));
}

NucleusMask build_mask(const LogitVector& l, const SamplerSpec& spec) { return prepare(l, spec).mask; }

ProbVector sampling_distribution(const LogitVector& l, const SamplerSpec& spec) {
  const PreparedStep step = prepare(l, spec);
  return softmax_stable(apply_mask(step.scaled, step.mask));
}

TokenId sample(const LogitVector& l, const SamplerSpec& spec, Rng& rng) {
  if (spec.kind == SamplerKind::kGreedy) {
    spec.validate();
    return argmax(l);
  }
  const PreparedStep step = prepare(l, spec);
  return categorical_sample(softmax_stable(apply_mask(step.scaled, step.mask)), rng);
}

}  // namespace topns
