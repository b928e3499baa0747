// SPDX-License-Identifier: Apache-2.0

#include "topns/harness/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "topns/error.hpp"
#include "topns/harness/report.hpp"
#include "topns/samplers.hpp"

namespace topns::harness {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[order[m]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

AnalyzeResult analyze(std::span<const LogitVector> vectors, double n, double p,
                      std::span<const std::optional<TokenId>> chosen_tokens) {
  if (vectors.empty()) throw InvalidParameter("analyze needs at least one vector");
  if (!chosen_tokens.empty() && chosen_tokens.size() != vectors.size())
    throw InvalidParameter("chosen token list must be parallel to the vectors");
  // fail fast on bad parameters rather than once per row
  SamplerSpec::top_n_sigma(n).validate();
  SamplerSpec::top_p(p).validate();

  AnalyzeResult result;
  for (std::size_t step = 0; step < vectors.size(); ++step) {
    const LogitVector& l = vectors[step];
    try {
      TraceRecord rec;
      rec.step = step;
      rec.sigma_distance = compute_stats(l).sigma_distance;
      const NucleusMask nsigma = mask_top_nsigma(l, 1.0, n);
      rec.nucleus_size_topnsigma = nsigma.size();
      const ProbVector probs = softmax_stable(l);
      double mass = 0.0;
      for (TokenId i : nsigma.indices()) mass += probs[i];
      rec.nucleus_mass_topnsigma = std::min(mass, 1.0);
      rec.nucleus_size_topp = mask_top_p(probs, p).size();
      if (!chosen_tokens.empty()) rec.chosen_token = chosen_tokens[step];
      result.records.push_back(rec);
    } catch (const Error& e) {
      result.errors.push_back({step, e.what()});
    }
  }
  return result;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidParameter("spearman needs equal-length samples");
  if (x.size() < 2) return 0.0;
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double sigma_distance_size_correlation(std::span<const TraceRecord> records) {
  std::vector<double> d, s;
  for (const auto& r : records) {
    d.push_back(r.sigma_distance);
    s.push_back(static_cast<double>(r.nucleus_size_topnsigma));
  }
  return spearman(d, s);
}

void write_trace_csv(std::ostream& out, const AnalyzeResult& result) {
  out << "step,sigma_distance,nucleus_size_topnsigma,nucleus_mass_topnsigma,nucleus_size_topp,chosen_token\n";
  for (const auto& r : result.records) {
    out << r.step << ',' << format_real(r.sigma_distance) << ',' << r.nucleus_size_topnsigma << ','
        << format_real(r.nucleus_mass_topnsigma) << ',' << r.nucleus_size_topp << ',';
    if (r.chosen_token) out << *r.chosen_token;
    out << '\n';
  }
}

nlohmann::json trace_to_json(const AnalyzeResult& result) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : result.records) {
    nlohmann::json j = {{"step", r.step},
                        {"sigma_distance", r.sigma_distance},
                        {"nucleus_size_topnsigma", r.nucleus_size_topnsigma},
                        {"nucleus_mass_topnsigma", r.nucleus_mass_topnsigma},
                        {"nucleus_size_topp", r.nucleus_size_topp}};
    j["chosen_token"] = r.chosen_token ? nlohmann::json(*r.chosen_token) : nlohmann::json(nullptr);
    records.push_back(std::move(j));
  }
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& e : result.errors) errors.push_back({{"step", e.step}, {"error", e.message}});
  return {{"records", std::move(records)},
          {"errors", std::move(errors)},
          {"rank_correlation", sigma_distance_size_correlation(result.records)}};
}

}  // namespace topns::harness
