// SPDX-License-Identifier: Apache-2.0
//
// topns: command-line front end for the samplers, diagnostics and checks.
//
// Exit codes: 0 ok, 1 other error, 2 invalid parameter, 3 parse error,
// 4 verification failure, 5 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "topns/error.hpp"
#include "topns/harness/analyze.hpp"
#include "topns/harness/dump.hpp"
#include "topns/harness/kv_config.hpp"
#include "topns/harness/majvote.hpp"
#include "topns/harness/report.hpp"
#include "topns/harness/sweep.hpp"
#include "topns/harness/verify.hpp"
#include "topns/rng.hpp"
#include "topns/samplers.hpp"
#include "topns/synth.hpp"

namespace {

using namespace topns;
using namespace topns::harness;

enum ExitCode : int {
  kOk = 0,
  kOtherError = 1,
  kInvalidParameter = 2,
  kParseFailure = 3,
  kVerificationFailure = 4,
  kIoFailure = 5,
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
  std::size_t threads = 0;
};

struct SamplerOptions {
  std::string sampler = "top_n_sigma";
  double temperature = 1.0;
  std::optional<double> n;
  std::optional<double> p;
  std::optional<std::size_t> k;

  void attach(CLI::App* cmd) {
    cmd->add_option("--sampler", sampler, "greedy|temperature|top_k|top_p|min_p|top_n_sigma")->capture_default_str();
    cmd->add_option("--temperature", temperature, "Sampling temperature")->capture_default_str();
    cmd->add_option("--n", n, "top_n_sigma: standard deviations kept (default 1.0)");
    cmd->add_option("--p", p, "top_p / min_p threshold (default 0.9 / 0.1)");
    cmd->add_option("--k", k, "top_k size (default 20)");
  }

  SamplerSpec build() const {
    SamplerSpec spec = parse_sampler_spec(sampler);
    spec.temperature = temperature;
    if (k) spec.k = k;
    if (p) spec.p = p;
    if (n) spec.n = n;
    spec.validate();
    for (const auto& w : spec.warnings()) std::cerr << "warning: " << w << '\n';
    return spec;
  }
};

/// Writes to --out or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw IoError("write to output failed");
  }

 private:
  std::ofstream file_;
};

void emit_json(const GlobalOptions& g, const nlohmann::json& j) {
  Output out(g.out);
  out.stream() << j.dump(2) << '\n';
  out.finish();
}

MixtureSpec load_mixture(const std::string& path) {
  const KeyValueConfig cfg = KeyValueConfig::load(path);
  cfg.require_only(mixture_keys());
  MixtureSpec spec = mixture_from_config(cfg);
  spec.validate();
  return spec;
}

/// Vectors from a dump, or `count` mixture draws seeded by index.
std::vector<LogitVector> input_vectors(const std::string& dump_path, const std::string& config_path,
                                       std::size_t count, std::vector<std::optional<TokenId>>* tokens = nullptr) {
  if (dump_path.empty() == config_path.empty())
    throw InvalidParameter("give exactly one of --dump or --config");
  if (!dump_path.empty()) {
    Dump d = read_dump(dump_path);
    if (tokens) *tokens = std::move(d.tokens);
    return std::move(d.rows);
  }
  const MixtureSpec base = load_mixture(config_path);
  std::vector<LogitVector> out;
  for (std::size_t i = 0; i < count; ++i) {
    MixtureSpec s = base;
    s.seed = mix_seed(base.seed, i);
    out.push_back(generate(s));
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& field : split_csv_line(text)) out.push_back(parse_real(field));
  return out;
}

int run_analyze(const GlobalOptions& g, const std::string& dump, double n, double p) {
  const Dump d = read_dump(dump);
  const AnalyzeResult r = analyze(d.rows, n, p, d.tokens);
  for (const auto& e : r.errors) std::cerr << "row " << e.step << ": " << e.message << '\n';
  if (g.format == "json") {
    emit_json(g, trace_to_json(r));
  } else {
    Output out(g.out);
    write_trace_csv(out.stream(), r);
    out.finish();
  }
  return kOk;
}

int run_sample(const GlobalOptions& g, const SamplerOptions& so, const std::string& dump, const std::string& config,
               std::size_t vectors, std::size_t draws) {
  const SamplerSpec spec = so.build();
  const auto rows = input_vectors(dump, config, vectors);
  Rng rng(g.seed);
  nlohmann::json records = nlohmann::json::array();
  std::ostringstream csv;
  csv << "step,draw,token,nucleus_size\n";
  for (std::size_t step = 0; step < rows.size(); ++step) {
    const std::size_t size = build_mask(rows[step], spec).size();
    for (std::size_t d = 0; d < draws; ++d) {
      const TokenId t = sample(rows[step], spec, rng);
      csv << step << ',' << d << ',' << t << ',' << size << '\n';
      records.push_back({{"step", step}, {"draw", d}, {"token", t}, {"nucleus_size", size}});
    }
  }
  if (g.format == "json") {
    emit_json(g, {{"sampler", spec.label()}, {"temperature", spec.temperature}, {"samples", records}});
  } else {
    Output out(g.out);
    out.stream() << csv.str();
    out.finish();
  }
  return kOk;
}

int run_sweep(const GlobalOptions& g, const SamplerOptions& so, const std::vector<std::string>& samplers,
              const std::string& dump, const std::string& config, std::size_t vectors, const std::string& temps,
              std::size_t seeds, std::size_t draws, bool keep_tokens) {
  SweepConfig cfg;
  if (samplers.empty()) {
    cfg.samplers.push_back(so.build());
  } else {
    for (const auto& s : samplers) cfg.samplers.push_back(parse_sampler_spec(s));
  }
  cfg.temperatures = parse_real_list(temps);
  cfg.seeds = seeds;
  cfg.draws_per_vector = draws;
  cfg.seed = g.seed;
  cfg.threads = g.threads;
  cfg.keep_tokens = keep_tokens;
  if (!config.empty()) cfg.informative_count = load_mixture(config).informative_count();
  const auto rows = input_vectors(dump, config, vectors);
  const SweepResult r = sweep(rows, cfg);
  for (const auto& c : r.cells)
    if (!c.error.empty()) std::cerr << c.sampler << " T=" << format_real(c.temperature) << ": " << c.error << '\n';
  if (g.format == "json") {
    emit_json(g, sweep_to_json(r));
  } else {
    Output out(g.out);
    write_sweep_csv(out.stream(), r);
    out.finish();
  }
  return kOk;
}

int run_majvote(const GlobalOptions& g, const SamplerOptions& so, const std::string& config,
                std::optional<std::size_t> queries) {
  MajVoteTask task = MajVoteTask::from_config(KeyValueConfig::load(config));
  if (queries) task.queries = *queries;
  const SamplerSpec spec = so.build();
  const auto rows = majvote(task, spec, g.seed, g.threads);
  if (g.format == "json") {
    nlohmann::json j = majvote_to_json(rows);
    j["sampler"] = spec.label();
    j["N"] = task.N;
    emit_json(g, j);
  } else {
    Output out(g.out);
    write_majvote_csv(out.stream(), rows);
    out.finish();
  }
  return kOk;
}

int run_verify(const GlobalOptions& g, std::optional<double> mc_tol) {
  Tolerances tol;
  if (mc_tol) {
    if (!(*mc_tol > 0.0)) throw InvalidParameter("--mc-tol must be positive");
    tol.set_monte_carlo(*mc_tol);
  }
  const VerifyReport report = verify_theory(tol, g.seed, g.threads);
  if (g.format == "csv") {
    Output out(g.out);
    out.stream() << "name,passed,value,expected,error,tolerance,margin\n";
    for (const auto& c : report.checks)
      out.stream() << c.name << ',' << (c.passed ? "true" : "false") << ',' << format_real(c.value) << ','
                   << format_real(c.expected) << ',' << format_real(c.error) << ',' << format_real(c.tolerance)
                   << ',' << format_real(c.margin) << '\n';
    out.finish();
  } else {
    emit_json(g, report_to_json(report));
  }
  if (report.passed()) return kOk;
  for (const auto& name : report.failed()) std::cerr << "FAILED " << name << '\n';
  return kVerificationFailure;
}

int run_gen_synth(const GlobalOptions& g, const std::string& config, std::size_t steps,
                  const std::string& schedule_text, std::optional<double> from, std::optional<double> to,
                  const std::string& dump_format) {
  const MixtureSpec spec = load_mixture(config);
  DumpFormat fmt;
  if (dump_format == "binary") {
    fmt = DumpFormat::kBinary;
  } else if (dump_format == "ndjson") {
    fmt = DumpFormat::kNdjson;
  } else {
    throw InvalidParameter("--dump-format must be binary or ndjson");
  }
  std::vector<LogitVector> rows;
  if (!schedule_text.empty() || from || to) {
    std::vector<double> schedule;
    if (!schedule_text.empty()) {
      if (from || to) throw InvalidParameter("--schedule excludes --sigma-from/--sigma-to");
      schedule = parse_real_list(schedule_text);
      if (steps == 0) steps = schedule.size();
    } else {
      if (!from || !to) throw InvalidParameter("--sigma-from and --sigma-to go together");
      if (steps == 0) throw InvalidParameter("--steps must be positive");
      schedule = linear_schedule(*from, *to, steps);
    }
    rows = generate_sequence(spec, steps, schedule);
  } else {
    const std::size_t count = steps == 0 ? 1 : steps;
    for (std::size_t i = 0; i < count; ++i) {
      MixtureSpec s = spec;
      s.seed = mix_seed(spec.seed, i);
      rows.push_back(count == 1 ? generate(spec) : generate(s));
    }
  }
  Output out(g.out);
  write_dump(out.stream(), rows, fmt);
  out.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-n-sigma sampling toolkit: masks, diagnostics, sweeps and self-checks"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", g.out, "Output path (default stdout)");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();

  std::string dump, config;
  std::size_t vectors = 10;

  auto* analyze_cmd = app.add_subcommand("analyze", "Per-step sigma-distance and nucleus diagnostics of a dump");
  double an_n = 1.0, an_p = 0.9;
  analyze_cmd->add_option("dump", dump, "Logit dump (binary or NDJSON)")->required();
  analyze_cmd->add_option("--n", an_n, "top_n_sigma n")->capture_default_str();
  analyze_cmd->add_option("--p", an_p, "top_p p")->capture_default_str();

  auto* sample_cmd = app.add_subcommand("sample", "Draw tokens with one sampler");
  SamplerOptions sample_opts;
  sample_opts.attach(sample_cmd);
  std::size_t draws = 1;
  sample_cmd->add_option("--dump", dump, "Logit dump");
  sample_cmd->add_option("--config", config, "Mixture config (alternative to --dump)");
  sample_cmd->add_option("--vectors", vectors, "Vectors drawn from --config")->capture_default_str();
  sample_cmd->add_option("--draws", draws, "Draws per vector")->capture_default_str();

  auto* sweep_cmd = app.add_subcommand("sweep", "Sampler x temperature x seed grid");
  SamplerOptions sweep_opts;
  sweep_opts.attach(sweep_cmd);
  std::vector<std::string> samplers;
  std::string temps = "1";
  std::size_t seeds = 1, sweep_draws = 100;
  bool keep_tokens = false;
  sweep_cmd->add_option("--samplers", samplers, "Repeatable kind[:k=..,p=..,n=..]; overrides --sampler");
  sweep_cmd->add_option("--temperatures", temps, "Comma-separated grid")->capture_default_str();
  sweep_cmd->add_option("--seeds", seeds, "Seeds per cell")->capture_default_str();
  sweep_cmd->add_option("--draws", sweep_draws, "Draws per vector per cell")->capture_default_str();
  sweep_cmd->add_option("--dump", dump, "Logit dump");
  sweep_cmd->add_option("--config", config, "Mixture config; enables informative-hit counts");
  sweep_cmd->add_option("--vectors", vectors, "Vectors drawn from --config")->capture_default_str();
  sweep_cmd->add_flag("--tokens", keep_tokens, "Include every drawn token (JSON)");

  auto* majvote_cmd = app.add_subcommand("majvote", "Maj@N accuracy per temperature on a synthetic task");
  SamplerOptions majvote_opts;
  majvote_opts.attach(majvote_cmd);
  std::optional<std::size_t> queries;
  majvote_cmd->add_option("--config", config, "Task config")->required();
  majvote_cmd->add_option("--queries", queries, "Override the task's query count");

  auto* verify_cmd = app.add_subcommand("verify-theory", "Run the invariant and closed-form checks");
  std::optional<double> mc_tol;
  verify_cmd->add_option("--mc-tol", mc_tol, "Override every Monte Carlo tolerance");

  auto* gen_cmd = app.add_subcommand("gen-synth", "Write synthetic logits as a dump");
  std::size_t steps = 0;
  std::string schedule, dump_format = "ndjson";
  std::optional<double> sigma_from, sigma_to;
  gen_cmd->add_option("--config", config, "Mixture config")->required();
  gen_cmd->add_option("--steps", steps, "Number of vectors");
  gen_cmd->add_option("--schedule", schedule, "Comma-separated sigma-distance per step");
  gen_cmd->add_option("--sigma-from", sigma_from, "Linear schedule start");
  gen_cmd->add_option("--sigma-to", sigma_to, "Linear schedule end");
  gen_cmd->add_option("--dump-format", dump_format, "binary|ndjson")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidParameter;
  }

  try {
    if (*analyze_cmd) return run_analyze(g, dump, an_n, an_p);
    if (*sample_cmd) return run_sample(g, sample_opts, dump, config, vectors, draws);
    if (*sweep_cmd)
      return run_sweep(g, sweep_opts, samplers, dump, config, vectors, temps, seeds, sweep_draws, keep_tokens);
    if (*majvote_cmd) return run_majvote(g, majvote_opts, config, queries);
    if (*verify_cmd) return run_verify(g, mc_tol);
    if (*gen_cmd) return run_gen_synth(g, config, steps, schedule, sigma_from, sigma_to, dump_format);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kInvalidParameter;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kInvalidParameter;
  } catch (const DegenerateInput& e) {
    std::cerr << "degenerate input: " << e.what() << '\n';
    return kInvalidParameter;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOtherError;
  }
  return kOk;
}
