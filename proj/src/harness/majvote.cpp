// SPDX-License-Identifier: Apache-2.0

#include "topns/harness/majvote.hpp"

#include <cmath>
#include <string>

#include "topns/detail/parallel.hpp"
#include "topns/error.hpp"
#include "topns/harness/report.hpp"
#include "topns/rng.hpp"

namespace topns::harness {

namespace {

std::size_t to_count(double v, const std::string& what) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) throw ParseError(what + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::map<TokenId, AnswerLabel> parse_answer_map(const std::string& text) {
  std::map<TokenId, AnswerLabel> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError("answer_map item '" + item + "' is not token:label");
    const TokenId token = to_count(parse_real(item.substr(0, colon)), "answer_map token");
    const AnswerLabel label = to_count(parse_real(item.substr(colon + 1)), "answer_map label");
    if (!out.emplace(token, label).second)
      throw ParseError("answer_map maps token " + std::to_string(token) + " twice");
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void MajVoteTask::validate() const {
  if (num_answers == 0) throw InvalidParameter("num_answers must be positive");
  if (N == 0) throw InvalidParameter("N must be at least 1");
  if (queries == 0) throw InvalidParameter("queries must be positive");
  if (temperature_grid.empty()) throw InvalidParameter("temperature grid is empty");
  for (double t : temperature_grid)
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("temperatures must be positive and finite");
  if (correct_answer >= num_answers) throw InvalidParameter("correct_answer is not a valid label");
  if (unmapped_label && *unmapped_label >= num_answers) throw InvalidParameter("unmapped_label is not a valid label");
  logit_spec.validate();
  bool correct_present = false;
  for (const auto& [token, label] : answer_token_map) {
    if (token >= logit_spec.vocab_size) throw InvalidParameter("answer_map token outside the vocabulary");
    if (label >= num_answers) throw InvalidParameter("answer_map label outside [0, num_answers)");
    correct_present = correct_present || label == correct_answer;
  }
  if (!correct_present) throw InvalidParameter("correct_answer has no token in answer_map");
}

std::optional<AnswerLabel> MajVoteTask::label_of(TokenId token) const {
  const auto it = answer_token_map.find(token);
  if (it != answer_token_map.end()) return it->second;
  return unmapped_label;
}

MajVoteTask MajVoteTask::from_config(const KeyValueConfig& cfg) {
  std::set<std::string> allowed = mixture_keys();
  allowed.insert({"num_answers", "answer_map", "unmapped_label", "correct_answer", "N", "queries", "temperatures"});
  cfg.require_only(allowed);

  MajVoteTask task;
  task.logit_spec = mixture_from_config(cfg);
  task.num_answers = static_cast<std::size_t>(cfg.get_u64("num_answers"));
  task.answer_token_map = parse_answer_map(cfg.get_string("answer_map"));
  if (cfg.has("unmapped_label")) task.unmapped_label = static_cast<std::size_t>(cfg.get_u64("unmapped_label"));
  task.correct_answer = static_cast<std::size_t>(cfg.get_u64("correct_answer"));
  task.N = static_cast<std::size_t>(cfg.get_u64("N"));
  if (cfg.has("queries")) task.queries = static_cast<std::size_t>(cfg.get_u64("queries"));
  if (cfg.has("temperatures")) task.temperature_grid = cfg.get_doubles("temperatures");
  return task;
}

std::optional<AnswerLabel> majority(const std::vector<std::size_t>& label_counts) {
  std::optional<AnswerLabel> best;
  std::size_t best_count = 0;
  for (std::size_t label = 0; label < label_counts.size(); ++label) {
    if (label_counts[label] > best_count) {
      best_count = label_counts[label];
      best = label;
    }
  }
  return best;
}

std::vector<MajVoteRow> majvote(const MajVoteTask& task, const SamplerSpec& sampler, std::uint64_t seed,
                                std::size_t threads) {
  task.validate();
  sampler.validate();

  struct QueryOutcome {
    bool majority_correct = false;
    bool first_correct = false;
  };

  std::vector<MajVoteRow> rows;
  for (std::size_t ti = 0; ti < task.temperature_grid.size(); ++ti) {
    const SamplerSpec spec = sampler.with_temperature(task.temperature_grid[ti]);
    const std::uint64_t temp_seed = mix_seed(seed, ti);
    auto run_query = [&](std::size_t q) {
      MixtureSpec ms = task.logit_spec;
      ms.seed = mix_seed(task.logit_spec.seed, q);
      const LogitVector l = generate(ms);
      const CumulativeTable table(sampling_distribution(l, spec));
      Rng rng(mix_seed(temp_seed, q));
      std::vector<std::size_t> counts(task.num_answers, 0);
      QueryOutcome out;
      for (std::size_t s = 0; s < task.N; ++s) {
        const auto label = task.label_of(spec.kind == SamplerKind::kGreedy ? argmax(l) : table.draw(rng));
        if (label) ++counts[*label];
        if (s == 0) out.first_correct = label == task.correct_answer;
      }
      out.majority_correct = majority(counts) == task.correct_answer;
      return out;
    };
    const auto outcomes = detail::parallel_map(task.queries, run_query, threads);

    MajVoteRow row;
    row.temperature = spec.temperature;
    row.queries = task.queries;
    std::size_t first = 0;
    for (const auto& o : outcomes) {
      row.correct += o.majority_correct ? 1 : 0;
      first += o.first_correct ? 1 : 0;
    }
    row.accuracy = static_cast<double>(row.correct) / static_cast<double>(row.queries);
    row.first_sample_accuracy = static_cast<double>(first) / static_cast<double>(row.queries);
    rows.push_back(row);
  }
  return rows;
}

void write_majvote_csv(std::ostream& out, const std::vector<MajVoteRow>& rows) {
  out << "temperature,queries,correct,accuracy,first_sample_accuracy\n";
  for (const auto& r : rows)
    out << format_real(r.temperature) << ',' << r.queries << ',' << r.correct << ',' << format_real(r.accuracy) << ','
        << format_real(r.first_sample_accuracy) << '\n';
}

nlohmann::json majvote_to_json(const std::vector<MajVoteRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"temperature", r.temperature},
                   {"queries", r.queries},
                   {"correct", r.correct},
                   {"accuracy", r.accuracy},
                   {"first_sample_accuracy", r.first_sample_accuracy}});
  return {{"rows", std::move(out)}};
}

}  // namespace topns::harness
