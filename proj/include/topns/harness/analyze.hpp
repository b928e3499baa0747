#pragma once

// SPDX-License-Identifier: Apache-2.0

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "topns/logit_core.hpp"

namespace topns::harness {

/// Per-step diagnostics of one logit vector (at T = 1).
struct TraceRecord {
  std::size_t step = 0;
  double sigma_distance = 0.0;
  std::size_t nucleus_size_topnsigma = 0;
  double nucleus_mass_topnsigma = 0.0;
  std::size_t nucleus_size_topp = 0;
  std::optional<TokenId> chosen_token;
};

struct RowError {
  std::size_t step = 0;
  std::string message;
};

struct AnalyzeResult {
  std::vector<TraceRecord> records;
  std::vector<RowError> errors;  ///< degenerate rows, skipped
};

/// Trace of every vector; a row that fails (e.g. < 2 finite logits) lands in `errors` and the run continues.
AnalyzeResult analyze(std::span<const LogitVector> vectors, double n, double p,
                      std::span<const std::optional<TokenId>> chosen_tokens = {});

/// Spearman rank correlation with average ranks for ties; 0 if either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// Rank correlation between sigma-distance and top-n-sigma nucleus size over `records`.
double sigma_distance_size_correlation(std::span<const TraceRecord> records);

void write_trace_csv(std::ostream& out, const AnalyzeResult& result);
nlohmann::json trace_to_json(const AnalyzeResult& result);

}  // namespace topns::harness
