// SPDX-License-Identifier: Apache-2.0

#include "topns/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topns/error.hpp"

namespace topns {

namespace {

// Rejection below a floor this far under the noise mean would discard most draws.
constexpr double kMinFloorZ = -3.0;

double draw_below(Rng& rng, const GaussianParams& noise, double floor) {
  for (;;) {
    const double x = rng.normal(noise.mu, noise.sigma);
    if (x < floor) return x;
  }
}

void check_floor(const GaussianParams& noise, double floor) {
  if (floor < noise.mu + kMinFloorZ * noise.sigma)
    throw InvalidParameter("informative region reaches more than 3 sigma below the noise mean");
}

// Informative gaps for one vector: the fixed offsets, or uniform draws in uniform-width mode.
std::vector<double> informative_gaps(const MixtureSpec& spec, Rng& rng) {
  if (!spec.uniform_width) return spec.informative_offsets;
  std::vector<double> gaps(spec.informative_count(), 0.0);
  for (std::size_t j = 1; j < gaps.size(); ++j) gaps[j] = rng.uniform(0.0, *spec.uniform_width);
  std::sort(gaps.begin() + 1, gaps.end());
  return gaps;
}

// Realized sigma-distance of {informative heights, noise} from running sums; avoids
// rebuilding the vector during bisection.
struct NoiseMoments {
  double sum = 0.0;
  double sumsq = 0.0;
  std::size_t count = 0;
};

NoiseMoments moments(std::span<const double> noise) {
  NoiseMoments m;
  for (double x : noise) {
    m.sum += x;
    m.sumsq += x * x;
  }
  m.count = noise.size();
  return m;
}

double sigma_distance_at(double top, double mu, std::span<const double> heights, const NoiseMoments& nm) {
  double sum = nm.sum;
  double sumsq = nm.sumsq;
  for (double c : heights) {
    const double x = mu + (top - mu) * c;
    sum += x;
    sumsq += x * x;
  }
  const double n = static_cast<double>(nm.count + heights.size());
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return var > 0.0 ? (top - mean) / std::sqrt(var) : 0.0;
}

double solve_top(double target, double mu, double sigma, std::span<const double> heights,
                 const NoiseMoments& nm) {
  double lo = mu;
  double hi = mu + 2.0 * (target + 1.0) * sigma;
  while (sigma_distance_at(hi, mu, heights, nm) < target) {
    lo = hi;
    hi = mu + 2.0 * (hi - mu);
    if (hi - mu > 1e6 * sigma)
      throw InvalidParameter("sigma-distance " + std::to_string(target) + " unreachable at this vocabulary size");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (sigma_distance_at(mid, mu, heights, nm) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void MixtureSpec::validate() const {
  noise.validate();
  if (informative_offsets.empty()) throw InvalidParameter("informative_offsets must be nonempty");
  if (informative_offsets.front() != 0.0) throw InvalidParameter("informative_offsets[0] must be 0");
  for (std::size_t j = 1; j < informative_offsets.size(); ++j) {
    if (!(informative_offsets[j] >= informative_offsets[j - 1]) || !std::isfinite(informative_offsets[j]))
      throw InvalidParameter("informative_offsets must be finite and nondecreasing");
  }
  if (vocab_size <= informative_offsets.size())
    throw InvalidParameter("vocab_size must exceed the number of informative tokens");
  if (!std::isfinite(target_max) || !(target_max > noise.mu))
    throw InvalidParameter("target_max must exceed the noise mean");
  if (uniform_width && !(*uniform_width > 0.0 && std::isfinite(*uniform_width)))
    throw InvalidParameter("uniform_width must be positive");
}

LogitVector generate(const MixtureSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::vector<double> gaps = informative_gaps(spec, rng);
  std::vector<double> values(spec.vocab_size);
  for (std::size_t j = 0; j < gaps.size(); ++j) values[j] = spec.target_max - gaps[j];
  const double floor = spec.target_max - gaps.back();
  check_floor(spec.noise, floor);
  for (std::size_t i = gaps.size(); i < values.size(); ++i) values[i] = draw_below(rng, spec.noise, floor);
  return LogitVector(std::move(values));
}

std::vector<LogitVector> generate_sequence(const MixtureSpec& spec, std::size_t steps,
                                           std::span<const double> sigma_distance_schedule) {
  spec.validate();
  if (steps == 0) throw InvalidParameter("steps must be positive");
  if (sigma_distance_schedule.size() != steps) throw InvalidParameter("schedule length must equal steps");
  for (double d : sigma_distance_schedule)
    if (!(d >= 1.0) || !std::isfinite(d)) throw InvalidParameter("sigma-distance schedule values must be >= 1");

  const double mu = spec.noise.mu;
  const double span_ref = spec.target_max - mu;
  const std::size_t k = spec.informative_count();

  std::vector<LogitVector> out;
  out.reserve(steps);
  for (std::size_t step = 0; step < steps; ++step) {
    const double target = sigma_distance_schedule[step];
    Rng rng(mix_seed(spec.seed, step));
    const std::vector<double> gaps = informative_gaps(spec, rng);
    std::vector<double> heights(k);
    for (std::size_t j = 0; j < k; ++j) heights[j] = 1.0 - gaps[j] / span_ref;

    std::vector<double> noise(spec.vocab_size - k);
    for (double& x : noise) x = rng.normal(mu, spec.noise.sigma);

    double top = mu;
    for (int round = 0;; ++round) {
      top = solve_top(target, mu, spec.noise.sigma, heights, moments(noise));
      const double floor = mu + (top - mu) * heights.back();
      check_floor(spec.noise, floor);
      bool redrawn = false;
      for (double& x : noise) {
        if (x >= floor) {
          x = draw_below(rng, spec.noise, floor);
          redrawn = true;
        }
      }
      if (!redrawn) break;
      if (round == 64) throw InvalidParameter("sigma-distance schedule did not settle");
    }

    std::vector<double> values(spec.vocab_size);
    for (std::size_t j = 0; j < k; ++j) values[j] = mu + (top - mu) * heights[j];
    std::copy(noise.begin(), noise.end(), values.begin() + static_cast<std::ptrdiff_t>(k));
    LogitVector v(std::move(values));
    if (std::abs(compute_stats(v).sigma_distance - target) > 0.5)
      throw InvalidParameter("sigma-distance " + std::to_string(target) + " not reached");
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<double> gaussian_logits(std::size_t count, const GaussianParams& params, Rng& rng) {
  params.validate();
  std::vector<double> out(count);
  for (double& x : out) x = rng.normal(params.mu, params.sigma);
  return out;
}

std::vector<double> uniform_logits(std::size_t count, const UniformParams& params, Rng& rng) {
  params.validate();
  std::vector<double> out(count);
  const double lo = params.upper - params.width;
  for (double& x : out) x = rng.uniform(lo, params.upper);
  return out;
}

std::vector<double> linear_schedule(double first, double last, std::size_t steps) {
  if (steps == 0) return {};
  if (steps == 1) return {first};
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i)
    out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return out;
}

}  // namespace topns
