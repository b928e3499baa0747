// SPDX-License-Identifier: Apache-2.0

#include "topns/harness/sweep.hpp"

#include <cmath>
#include <map>
#include <string>

#include "topns/detail/parallel.hpp"
#include "topns/error.hpp"
#include "topns/harness/report.hpp"

namespace topns::harness {

namespace {

constexpr const char* kCsvHeader =
    "sampler,temperature,seed_index,draws,mean_nucleus_size,informative_hits,informative_fraction,error";

std::size_t parse_count(const std::string& s) {
  const double v = parse_real(s);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) throw ParseError("'" + s + "' is not a count");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::optional<double> SweepCell::informative_fraction() const {
  if (!informative_hits || draws == 0) return std::nullopt;
  return static_cast<double>(*informative_hits) / static_cast<double>(draws);
}

SweepResult sweep(std::span<const LogitVector> vectors, const SweepConfig& config) {
  if (vectors.empty()) throw InvalidParameter("sweep needs at least one vector");
  if (config.samplers.empty()) throw InvalidParameter("sweep needs at least one sampler");
  if (config.temperatures.empty()) throw InvalidParameter("sweep needs at least one temperature");
  if (config.seeds == 0) throw InvalidParameter("sweep needs at least one seed");
  if (config.draws_per_vector == 0) throw InvalidParameter("draws per vector must be positive");
  for (double t : config.temperatures)
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("sweep temperatures must be positive");

  const std::size_t per_seed = config.samplers.size() * config.temperatures.size();
  const std::size_t total = per_seed * config.seeds;

  auto run_cell = [&](std::size_t idx) {
    const std::size_t seed_index = idx / per_seed;
    const std::size_t within = idx % per_seed;
    const SamplerSpec spec =
        config.samplers[within / config.temperatures.size()].with_temperature(
            config.temperatures[within % config.temperatures.size()]);

    SweepCell cell;
    cell.sampler = spec.label();
    cell.temperature = spec.temperature;
    cell.seed_index = seed_index;
    try {
      Rng rng(mix_seed(mix_seed(config.seed, seed_index), within));
      std::size_t hits = 0;
      double nucleus_total = 0.0;
      for (const LogitVector& l : vectors) {
        std::vector<TokenId> drawn;
        if (spec.kind == SamplerKind::kGreedy) {
          nucleus_total += 1.0;
          drawn.assign(config.draws_per_vector, argmax(l));
        } else {
          nucleus_total += static_cast<double>(build_mask(l, spec).size());
          const CumulativeTable table(sampling_distribution(l, spec));
          drawn.reserve(config.draws_per_vector);
          for (std::size_t d = 0; d < config.draws_per_vector; ++d) drawn.push_back(table.draw(rng));
        }
        if (config.informative_count)
          for (TokenId t : drawn) hits += t < *config.informative_count ? 1 : 0;
        if (config.keep_tokens) cell.tokens.insert(cell.tokens.end(), drawn.begin(), drawn.end());
        cell.draws += drawn.size();
      }
      cell.mean_nucleus_size = nucleus_total / static_cast<double>(vectors.size());
      if (config.informative_count) cell.informative_hits = hits;
    } catch (const Error& e) {
      SweepCell failed;
      failed.sampler = cell.sampler;
      failed.temperature = cell.temperature;
      failed.seed_index = cell.seed_index;
      cell = std::move(failed);
      cell.error = e.what();
    }
    return cell;
  };

  SweepResult result;
  result.cells = detail::parallel_map(total, run_cell, config.threads);
  return result;
}

std::vector<SweepAggregate> aggregate(const SweepResult& result) {
  std::map<std::pair<std::string, double>, SweepAggregate> groups;
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, std::size_t> ok_cells;
  for (const auto& c : result.cells) {
    const auto key = std::make_pair(c.sampler, c.temperature);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      order.push_back(key);
      it->second.sampler = c.sampler;
      it->second.temperature = c.temperature;
    }
    SweepAggregate& a = it->second;
    if (!c.error.empty()) {
      ++a.failed_cells;
      continue;
    }
    a.draws += c.draws;
    a.informative_hits += c.informative_hits.value_or(0);
    a.mean_nucleus_size += c.mean_nucleus_size;
    ++ok_cells[key];
  }
  std::vector<SweepAggregate> out;
  for (const auto& key : order) {
    SweepAggregate a = groups[key];
    if (ok_cells[key] > 0) a.mean_nucleus_size /= static_cast<double>(ok_cells[key]);
    out.push_back(a);
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << kCsvHeader << '\n';
  for (const auto& c : result.cells) {
    out << c.sampler << ',' << format_real(c.temperature) << ',' << c.seed_index << ',' << c.draws << ','
        << format_real(c.mean_nucleus_size) << ',';
    if (c.informative_hits) out << *c.informative_hits;
    out << ',';
    if (auto f = c.informative_fraction()) out << format_real(*f);
    out << ',';
    // commas would break the column layout
    std::string err = c.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    out << err << '\n';
  }
}

nlohmann::json sweep_to_json(const SweepResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : result.cells) {
    nlohmann::json j = {{"sampler", c.sampler},
                        {"temperature", c.temperature},
                        {"seed_index", c.seed_index},
                        {"draws", c.draws},
                        {"mean_nucleus_size", c.mean_nucleus_size}};
    j["informative_hits"] = c.informative_hits ? nlohmann::json(*c.informative_hits) : nlohmann::json(nullptr);
    const auto f = c.informative_fraction();
    j["informative_fraction"] = f ? nlohmann::json(*f) : nlohmann::json(nullptr);
    if (!c.tokens.empty()) j["tokens"] = c.tokens;
    if (!c.error.empty()) j["error"] = c.error;
    cells.push_back(std::move(j));
  }
  return {{"cells", std::move(cells)}};
}

SweepResult read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kCsvHeader))
    throw ParseError("sweep CSV header mismatch");
  SweepResult result;
  long long row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) throw ParseError("expected 8 columns", row);
    try {
      SweepCell c;
      c.sampler = f[0];
      c.temperature = parse_real(f[1]);
      c.seed_index = parse_count(f[2]);
      c.draws = parse_count(f[3]);
      c.mean_nucleus_size = parse_real(f[4]);
      if (!f[5].empty()) c.informative_hits = parse_count(f[5]);
      c.error = f[7];
      result.cells.push_back(std::move(c));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), row);
    }
    ++row;
  }
  return result;
}

SweepResult sweep_from_json(const nlohmann::json& j) {
  SweepResult result;
  try {
    for (const auto& jc : j.at("cells")) {
      SweepCell c;
      c.sampler = jc.at("sampler").get<std::string>();
      c.temperature = jc.at("temperature").get<double>();
      c.seed_index = jc.at("seed_index").get<std::size_t>();
      c.draws = jc.at("draws").get<std::size_t>();
      c.mean_nucleus_size = jc.at("mean_nucleus_size").get<double>();
      if (!jc.at("informative_hits").is_null()) c.informative_hits = jc["informative_hits"].get<std::size_t>();
      if (jc.contains("tokens")) c.tokens = jc["tokens"].get<std::vector<TokenId>>();
      if (jc.contains("error")) c.error = jc["error"].get<std::string>();
      result.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed sweep JSON: ") + e.what());
  }
  return result;
}

}  // namespace topns::harness
