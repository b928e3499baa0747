// SPDX-License-Identifier: Apache-2.0

#include "topns/harness/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "topns/detail/parallel.hpp"
#include "topns/logit_core.hpp"
#include "topns/rng.hpp"
#include "topns/samplers.hpp"
#include "topns/special_functions.hpp"
#include "topns/synth.hpp"
#include "topns/theory.hpp"

namespace topns::harness {

namespace {

constexpr std::array<double, 7> kTemperatures{0.01, 0.5, 1.0, 1.5, 2.0, 3.0, 10.0};
constexpr std::array<double, 4> kRoundTripP{0.1, 0.25, 0.5, 0.9};
constexpr std::array<double, 3> kLimitP{0.05, 0.1, 0.3};
constexpr std::size_t kRandomVectors = 1000;
constexpr std::size_t kRoundTripV = 200000;
constexpr std::size_t kLargeV = 1000000;
constexpr std::size_t kTheoremSeeds = 10;
constexpr std::size_t kBoundPairs = 100;

// Stream identifiers for mix_seed; one per randomized check family.
enum Stream : std::uint64_t {
  kStreamRandomVectors = 1,
  kStreamGaussianRoundTrip,
  kStreamUniformRoundTrip,
  kStreamLargeGaussian,
  kStreamBoundPairs,
  kStreamUniformExact,
  kStreamEq8,
};

CheckResult make_check(std::string name, double value, double expected, double error, double tolerance) {
  CheckResult c;
  c.name = std::move(name);
  c.value = value;
  c.expected = expected;
  c.error = error;
  c.tolerance = tolerance;
  c.margin = tolerance - error;
  c.passed = error <= tolerance;  // NaN fails
  return c;
}

std::string p_suffix(double p) {
  std::string s = std::to_string(p);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

/// Random vector with varied size, scale, spikes and masked entries.
LogitVector random_logits(Rng& rng) {
  const auto v = static_cast<std::size_t>(2 + rng.uniform() * 2000);
  const double mu = rng.uniform(-10.0, 10.0);
  const double sigma = rng.uniform(0.05, 5.0);
  std::vector<double> l(v);
  for (double& x : l) x = rng.normal(mu, sigma);
  if (rng.uniform() < 0.5) {
    const auto spikes = static_cast<std::size_t>(1 + rng.uniform() * 5);
    const double top = *std::max_element(l.begin(), l.end()) + rng.uniform(0.0, 6.0 * sigma);
    for (std::size_t s = 0; s < spikes && s < v; ++s) l[s] = top - rng.uniform(0.0, 2.0 * sigma);
  }
  if (rng.uniform() < 0.2 && v > 3) {
    const auto masked = static_cast<std::size_t>(rng.uniform() * static_cast<double>(v - 2));
    for (std::size_t i = 0; i < masked; ++i) l[v - 1 - i] = kNegInf;
  }
  return LogitVector(std::move(l));
}

double masked_mass(const LogitVector& l, const NucleusMask& mask) {
  const ProbVector probs = softmax_stable(l);
  double mass = 0.0;
  for (TokenId i : mask.indices()) mass += probs[i];
  return mass;
}

void invariance_checks(std::vector<CheckResult>& out, std::uint64_t seed, std::size_t threads) {
  struct Counts {
    double nsigma = 0, nsigma_scaled = 0, topk = 0, minp = 0;
  };
  const auto per_vector = detail::parallel_map(
      kRandomVectors,
      [&](std::size_t i) {
        Rng rng(mix_seed(mix_seed(seed, kStreamRandomVectors), i));
        const LogitVector l = random_logits(rng);
        const double n = rng.uniform(0.25, kTopNSigmaMaxN);
        const auto k = static_cast<std::size_t>(1 + rng.uniform() * 50);
        const double p = 1.0 - rng.uniform();
        Counts c;
        if (l.finite_count() >= 2) {
          const NucleusMask ref = mask_top_nsigma(l, 1.0, n);
          const NucleusMask ref_k = mask_top_k(l, k);
          for (double t : kTemperatures) {
            c.nsigma += build_mask(l, SamplerSpec::top_n_sigma(n, t)) == ref ? 0 : 1;
            // explicit evaluation on the scaled vector
            c.nsigma_scaled += mask_top_nsigma(temperature_scale(l, t), 1.0, n) == ref ? 0 : 1;
            c.topk += build_mask(l, SamplerSpec::top_k(k, t)) == ref_k ? 0 : 1;
          }
        }
        const double cutoff = l[argmax(l)] + std::log(p);
        std::vector<bool> brute(l.size());
        for (std::size_t j = 0; j < l.size(); ++j) brute[j] = std::isfinite(l[j]) && l[j] >= cutoff;
        c.minp = mask_min_p(l, 1.0, p) == NucleusMask(std::move(brute)) ? 0 : 1;
        return c;
      },
      threads);

  Counts total;
  for (const auto& c : per_vector) {
    total.nsigma += c.nsigma;
    total.nsigma_scaled += c.nsigma_scaled;
    total.topk += c.topk;
    total.minp += c.minp;
  }
  out.push_back(make_check("temperature_invariance_top_n_sigma", total.nsigma, 0, total.nsigma, 0));
  out.push_back(make_check("temperature_invariance_top_n_sigma_scaled", total.nsigma_scaled, 0, total.nsigma_scaled, 0));
  out.push_back(make_check("temperature_invariance_top_k", total.topk, 0, total.topk, 0));
  out.push_back(make_check("min_p_logit_equivalence", total.minp, 0, total.minp, 0));
}

void witness_checks(std::vector<CheckResult>& out) {
  // top-p and min-p nuclei grow with T; one fixed vector shows it
  const LogitVector l{2.0, 1.0, 0.0};
  const double top_p_growth = static_cast<double>(mask_top_p(l, 3.0, 0.9).size()) -
                              static_cast<double>(mask_top_p(l, 1.0, 0.9).size());
  const double min_p_growth = static_cast<double>(mask_min_p(l, 3.0, 0.3).size()) -
                              static_cast<double>(mask_min_p(l, 1.0, 0.3).size());
  // error is 1 when the nucleus fails to grow
  out.push_back(make_check("top_p_depends_on_temperature", top_p_growth, 1, top_p_growth >= 1 ? 0 : 1, 0));
  out.push_back(make_check("min_p_depends_on_temperature", min_p_growth, 1, min_p_growth >= 1 ? 0 : 1, 0));
}

void round_trip_checks(std::vector<CheckResult>& out, const Tolerances& tol, std::uint64_t seed) {
  const GaussianParams g{0.0, 1.0};
  Rng grng(mix_seed(seed, kStreamGaussianRoundTrip));
  const LogitVector gl(gaussian_logits(kRoundTripV, g, grng));
  for (double p : kRoundTripP) {
    const double mass = nucleus_mass_empirical(gl, gaussian_threshold(g, p)).mass;
    out.push_back(make_check("gaussian_round_trip_p" + p_suffix(p), mass, p, std::abs(mass - p), tol.mass_abs));
  }

  const UniformParams u{0.0, 4.0};
  Rng urng(mix_seed(seed, kStreamUniformRoundTrip));
  const LogitVector ul(uniform_logits(kRoundTripV, u, urng));
  for (double p : kRoundTripP) {
    const double mass = nucleus_mass_empirical(ul, uniform_threshold(u, p)).mass;
    out.push_back(make_check("uniform_round_trip_p" + p_suffix(p), mass, p, std::abs(mass - p), tol.mass_abs));
  }
}

void large_gaussian_checks(std::vector<CheckResult>& out, const Tolerances& tol, std::uint64_t seed,
                           std::size_t threads) {
  const GaussianParams g{0.0, 1.0};
  const std::array<double, 3> ts{g.mu - g.sigma, g.mu, g.mu + g.sigma};
  struct PerSeed {
    std::array<double, 3> integral{};
    std::array<double, kRoundTripP.size()> mass{};
  };
  const auto per_seed = detail::parallel_map(
      kTheoremSeeds,
      [&](std::size_t s) {
        Rng rng(mix_seed(mix_seed(seed, kStreamLargeGaussian), s));
        const std::vector<double> x = gaussian_logits(kLargeV, g, rng);
        PerSeed r;
        for (std::size_t i = 0; i < ts.size(); ++i) r.integral[i] = empirical_integral_I(x, ts[i]);
        const LogitVector l(x);
        for (std::size_t i = 0; i < kRoundTripP.size(); ++i)
          r.mass[i] = nucleus_mass_empirical(l, gaussian_threshold(g, kRoundTripP[i])).mass;
        return r;
      },
      threads);

  const char* t_names[] = {"mu_minus_sigma", "mu", "mu_plus_sigma"};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double avg = 0.0;
    for (const auto& r : per_seed) avg += r.integral[i];
    avg /= static_cast<double>(per_seed.size());
    const double exact = integral_I(g, ts[i]);
    out.push_back(make_check(std::string("integral_convergence_t_") + t_names[i], avg, exact,
                             std::abs(avg - exact) / exact, tol.integral_rel));
  }
  const double full = integral_I(g, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < kRoundTripP.size(); ++i) {
    double avg = 0.0;
    for (const auto& r : per_seed) avg += r.mass[i];
    avg /= static_cast<double>(per_seed.size());
    const double predicted = integral_I(g, gaussian_threshold(g, kRoundTripP[i])) / full;
    out.push_back(make_check("integral_ratio_mass_p" + p_suffix(kRoundTripP[i]), avg, predicted,
                             std::abs(avg - predicted) / predicted, tol.integral_rel));
  }
}

void uniform_bound_checks(std::vector<CheckResult>& out, const Tolerances& tol, std::uint64_t seed,
                          std::size_t threads) {
  const double bound = topnsigma_mass_uniform_bound(1.9, 1.0);
  out.push_back(make_check("uniform_bound_sigma1.9_n1", bound, 0.85, std::abs(bound - 0.85), tol.bound_abs));

  // Monte Carlo mass may not fall below the bound by more than the tolerance
  const auto shortfalls = detail::parallel_map(
      kBoundPairs,
      [&](std::size_t i) {
        Rng rng(mix_seed(mix_seed(seed, kStreamBoundPairs), i));
        const double sigma = rng.uniform(0.25, 3.0);
        const double n = rng.uniform(0.5, kTopNSigmaMaxN);
        const LogitVector l(uniform_logits(kLargeV, {0.0, 2.0 * std::numbers::sqrt3 * sigma}, rng));
        return topnsigma_mass_uniform_bound(sigma, n) - masked_mass(l, mask_top_nsigma(l, 1.0, n));
      },
      threads);
  const double worst = *std::max_element(shortfalls.begin(), shortfalls.end());
  out.push_back(make_check("uniform_bound_monte_carlo", worst, 0, std::max(0.0, worst), tol.uniform_mass_abs));

  const double sigma = 1.9, n = 1.0, width = 2.0 * std::numbers::sqrt3 * sigma;
  Rng rng(mix_seed(seed, kStreamUniformExact));
  const LogitVector l(uniform_logits(kLargeV, {0.0, width}, rng));
  const double mass = masked_mass(l, mask_top_nsigma(l, 1.0, n));
  const double exact = topnsigma_mass_uniform(sigma, n, width);
  out.push_back(make_check("uniform_exact_mass_monte_carlo", mass, exact, std::abs(mass - exact),
                           tol.uniform_mass_abs));
}

void gaussian_mass_checks(std::vector<CheckResult>& out, const Tolerances& tol, std::uint64_t seed) {
  const GaussianParams g{0.0, 1.0};
  const double d = 3.0, n = 1.0;
  const double predicted = topnsigma_mass_gaussian(g.sigma, d, n);
  Rng rng(mix_seed(seed, kStreamEq8));
  const LogitVector l(gaussian_logits(kLargeV, g, rng));
  const double mass = nucleus_mass_empirical(l, g.mu + (d - n) * g.sigma).mass;
  out.push_back(make_check("gaussian_top_n_sigma_mass_monte_carlo", mass, predicted, std::abs(mass - predicted),
                           tol.mass_abs));

  // the kept mass vanishes as sigma shrinks at a fixed gap
  const double tiny = topnsigma_mass_gaussian_gap(0.01, 0.5, n);
  out.push_back(make_check("gaussian_mass_small_sigma_limit", tiny, 0, tiny, tol.limit_abs));
}

void limit_checks(std::vector<CheckResult>& out, const Tolerances& tol) {
  const double m = 0.0;
  for (double p : kLimitP) {
    const double t = uniform_threshold({m, 20.0}, 1.0 - p);
    const double target = minp_logit_threshold(m, p);
    out.push_back(make_check("min_p_limit_a20_p" + p_suffix(p), t, target, std::abs(t - target), tol.limit_abs));
  }
  // convergence rate e^{-a} / p, with rounding slack
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_error = 0.0, worst_allowed = 0.0;
  for (double a : {10.0, 20.0, 50.0}) {
    for (double p : kLimitP) {
      const double err = std::abs(uniform_threshold({m, a}, 1.0 - p) - minp_logit_threshold(m, p));
      // forming 1 - (1 - p) costs up to eps / (2p) in the logarithm
      const double allowed = (std::exp(-a) + 4.0 * std::numeric_limits<double>::epsilon()) / p;
      if (allowed - err < worst_margin) {
        worst_margin = allowed - err;
        worst_error = err;
        worst_allowed = allowed;
      }
    }
  }
  out.push_back(make_check("min_p_limit_rate", worst_error, 0, worst_error, worst_allowed));
}

void analytic_checks(std::vector<CheckResult>& out, const Tolerances& tol) {
  double worst = 0.0;
  for (int i = -1999; i <= 1999; ++i) {
    const double y = i / 2000.0;
    worst = std::max(worst, std::abs(math::erf(math::erf_inv(y)) - y));
  }
  for (int k = 2; k <= 15; ++k) {
    const double y = 1.0 - std::pow(10.0, -k);
    worst = std::max(worst, std::abs(math::erf(math::erf_inv(y)) - y));
  }
  out.push_back(make_check("erf_inverse_round_trip", worst, 0, worst, tol.erf_abs));

  // thresholds fall as p rises; masses rise with n
  double violations = 0;
  const GaussianParams g{0.0, 1.0};
  const UniformParams u{0.0, 4.0};
  for (int i = 1; i < 99; ++i) {
    const double p0 = i / 100.0, p1 = (i + 1) / 100.0;
    violations += gaussian_threshold(g, p1) < gaussian_threshold(g, p0) ? 0 : 1;
    violations += uniform_threshold(u, p1) < uniform_threshold(u, p0) ? 0 : 1;
  }
  for (int i = 1; i < 34; ++i) {
    const double n0 = i / 10.0, n1 = (i + 1) / 10.0;
    violations += topnsigma_mass_uniform_bound(1.0, n1) > topnsigma_mass_uniform_bound(1.0, n0) ? 0 : 1;
    violations += topnsigma_mass_gaussian(1.0, 3.0, n1) > topnsigma_mass_gaussian(1.0, 3.0, n0) ? 0 : 1;
  }
  out.push_back(make_check("monotonicity", violations, 0, violations, 0));
}

}  // namespace

void Tolerances::set_monte_carlo(double tol) {
  mass_abs = tol;
  integral_rel = tol;
  uniform_mass_abs = tol;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> VerifyReport::failed() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

VerifyReport verify_theory(const Tolerances& tol, std::uint64_t seed, std::size_t threads) {
  VerifyReport report;
  report.seed = seed;
  auto& out = report.checks;
  invariance_checks(out, seed, threads);
  witness_checks(out);
  round_trip_checks(out, tol, seed);
  large_gaussian_checks(out, tol, seed, threads);
  uniform_bound_checks(out, tol, seed, threads);
  gaussian_mass_checks(out, tol, seed);
  limit_checks(out, tol);
  analytic_checks(out, tol);
  return report;
}

nlohmann::json report_to_json(const VerifyReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", c.value},
                      {"expected", c.expected},
                      {"error", c.error},
                      {"tolerance", c.tolerance},
                      {"margin", c.margin}});
  return {{"seed", report.seed}, {"passed", report.passed()}, {"failed", report.failed()}, {"checks", checks}};
}

}  // namespace topns::harness
