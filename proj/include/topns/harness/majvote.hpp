#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file majvote.hpp
 * @brief Majority voting over N samples per query on a synthetic answer task.
 *
 * Each query draws one logit vector from the task's mixture (seed mixed with
 * the query index), samples N tokens, maps every token to an answer label and
 * takes the most frequent label. Ties go to the lowest label. Tokens without
 * a mapping vote for `unmapped_label`, or abstain when it is unset; a query
 * where every sample abstains counts as wrong.
 */

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "topns/harness/kv_config.hpp"
#include "topns/logit_core.hpp"
#include "topns/samplers.hpp"
#include "topns/synth.hpp"

namespace topns::harness {

using AnswerLabel = std::size_t;

struct MajVoteTask {
  std::size_t num_answers = 2;
  std::map<TokenId, AnswerLabel> answer_token_map;
  std::optional<AnswerLabel> unmapped_label;
  AnswerLabel correct_answer = 0;
  MixtureSpec logit_spec;
  std::size_t N = 1;
  std::vector<double> temperature_grid{1.0};
  std::size_t queries = 200;

  /// Throws InvalidParameter on any violated invariant.
  void validate() const;

  /// Label for a drawn token, nullopt when it abstains.
  std::optional<AnswerLabel> label_of(TokenId token) const;

  /// Reads the mixture keys plus the task keys documented in kv_config.hpp.
  static MajVoteTask from_config(const KeyValueConfig& cfg);
};

struct MajVoteRow {
  double temperature = 1.0;
  std::size_t queries = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  /// Accuracy of the first of the N samples alone.
  double first_sample_accuracy = 0.0;
};

/// Label with the most votes (ties to the lowest label), nullopt if no votes.
std::optional<AnswerLabel> majority(const std::vector<std::size_t>& label_counts);

/// One row per temperature in the task grid; the sampler's own temperature is replaced.
std::vector<MajVoteRow> majvote(const MajVoteTask& task, const SamplerSpec& sampler, std::uint64_t seed,
                                std::size_t threads = 0);

void write_majvote_csv(std::ostream& out, const std::vector<MajVoteRow>& rows);
nlohmann::json majvote_to_json(const std::vector<MajVoteRow>& rows);

}  // namespace topns::harness
