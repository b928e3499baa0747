#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file sweep.hpp
 * @brief Sampler x temperature x seed grid over a fixed set of logit vectors.
 *
 * Each cell draws `draws_per_vector` tokens from every vector. When the
 * vectors come from the synthetic mixture, the informative tokens are
 * indices [0, informative_count) and each cell also reports how many draws
 * landed there.
 */

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "topns/logit_core.hpp"
#include "topns/samplers.hpp"

namespace topns::harness {

struct SweepConfig {
  /// Temperatures come from `temperatures`; each spec's own temperature is ignored.
  std::vector<SamplerSpec> samplers;
  std::vector<double> temperatures{1.0};
  std::size_t seeds = 1;
  std::size_t draws_per_vector = 100;
  std::uint64_t seed = 0;
  std::optional<std::size_t> informative_count;
  std::size_t threads = 0;
  /// Keep every drawn token in the result (JSON output only).
  bool keep_tokens = false;
};

struct SweepCell {
  std::string sampler;  ///< SamplerSpec::label()
  double temperature = 1.0;
  std::size_t seed_index = 0;
  std::size_t draws = 0;
  double mean_nucleus_size = 0.0;
  std::optional<std::size_t> informative_hits;
  std::vector<TokenId> tokens;
  std::string error;  ///< empty on success

  std::optional<double> informative_fraction() const;
};

struct SweepResult {
  std::vector<SweepCell> cells;
};

/// Summary over seeds for one (sampler, temperature) pair.
struct SweepAggregate {
  std::string sampler;
  double temperature = 1.0;
  std::size_t draws = 0;
  std::size_t informative_hits = 0;
  double mean_nucleus_size = 0.0;  ///< averaged over successful cells
  std::size_t failed_cells = 0;

  bool operator==(const SweepAggregate&) const = default;
};

/// Runs the grid. A cell that throws records the message in `error`; the sweep continues.
SweepResult sweep(std::span<const LogitVector> vectors, const SweepConfig& config);

std::vector<SweepAggregate> aggregate(const SweepResult& result);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::json sweep_to_json(const SweepResult& result);

/// Readers for the two output forms (tokens are only present in JSON).
SweepResult read_sweep_csv(std::istream& in);
SweepResult sweep_from_json(const nlohmann::json& j);

}  // namespace topns::harness
