#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "topns/harness/dump.hpp"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / ("topns_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path file(const std::string& name, const std::string& content) const {
    std::ofstream(dir / name) << content;
    return dir / name;
  }
};

int run(const std::string& args, const fs::path& out_log) {
  const std::string cmd = std::string(TOPNS_CLI_PATH) + " " + args + " > " + out_log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMixture = "vocab_size = 300\nnoise_mu = 0\nnoise_sigma = 1\noffsets = 0, 0.3\ntarget_max = 8\nseed = 3\n";

}  // namespace

TEST_CASE("cli: gen-synth, analyze and sample") {
  Scratch s;
  const auto cfg = s.file("mix.cfg", kMixture);
  const auto log = s.dir / "log.txt";
  const auto dump = s.dir / "seq.ndjson";
  REQUIRE(run("gen-synth --config " + cfg.string() + " --sigma-from 5 --sigma-to 12 --steps 8 --out " +
                  dump.string(),
              log) == 0);
  CHECK(topns::harness::read_dump(dump).rows.size() == 8);

  const auto bin = s.dir / "one.bin";
  REQUIRE(run("gen-synth --config " + cfg.string() + " --dump-format binary --out " + bin.string(), log) == 0);
  CHECK(slurp(bin).substr(0, 4) == "LGTD");

  const auto trace = s.dir / "trace.json";
  CHECK(run("analyze " + dump.string() + " --format json --out " + trace.string(), log) == 0);
  const auto j = nlohmann::json::parse(slurp(trace));
  CHECK(j["records"].size() == 8);

  const auto samples = s.dir / "samples.csv";
  CHECK(run("sample --dump " + dump.string() + " --sampler top_n_sigma --n 1 --temperature 2 --seed 5 --out " +
                samples.string(),
            log) == 0);
  const auto again = s.dir / "samples2.csv";
  CHECK(run("--seed 5 sample --dump " + dump.string() + " --sampler top_n_sigma --n 1 --temperature 2 --out " +
                again.string(),
            log) == 0);
  CHECK(slurp(samples) == slurp(again));
  CHECK(slurp(samples).rfind("step,draw,token,nucleus_size\n", 0) == 0);
}

TEST_CASE("cli: sweep and majvote") {
  Scratch s;
  const auto cfg = s.file("mix.cfg", kMixture);
  const auto log = s.dir / "log.txt";
  const auto out = s.dir / "sweep.csv";
  CHECK(run("sweep --config " + cfg.string() +
                " --samplers top_n_sigma:n=1 --samplers temperature --temperatures 1,3 --seeds 2 --draws 50 --out " +
                out.string(),
            log) == 0);
  CHECK(slurp(out).rfind("sampler,temperature,seed_index", 0) == 0);

  const auto task = s.file("task.cfg", std::string(kMixture) +
                                           "num_answers = 2\nanswer_map = 0:0, 1:0\nunmapped_label = 1\n"
                                           "correct_answer = 0\nN = 5\nqueries = 20\ntemperatures = 1, 3\n");
  const auto mv = s.dir / "mv.json";
  CHECK(run("majvote --config " + task.string() + " --format json --out " + mv.string(), log) == 0);
  CHECK(nlohmann::json::parse(slurp(mv))["rows"].size() == 2);
}

TEST_CASE("cli: exit codes") {
  Scratch s;
  const auto log = s.dir / "log.txt";
  const auto cfg = s.file("mix.cfg", kMixture);
  const auto dump = s.dir / "d.ndjson";
  REQUIRE(run("gen-synth --config " + cfg.string() + " --out " + dump.string(), log) == 0);

  // invalid parameter
  CHECK(run("sample --dump " + dump.string() + " --sampler top_n_sigma --n 5", log) == 2);
  CHECK(run("sample --dump " + dump.string() + " --sampler top_k --k 0", log) == 2);
  CHECK(run("sample --dump " + dump.string() + " --temperature -1", log) == 2);
  CHECK(run("sample --dump " + dump.string() + " --sampler beam", log) == 2);
  CHECK(run("--format xml verify-theory", log) == 2);
  CHECK(run("no-such-command", log) == 2);
  // parse error
  const auto bad = s.file("bad.ndjson", "{\"logits\":[0,1]}\n{\"logits\":[0,\"nan\"]}\n");
  CHECK(run("analyze " + bad.string(), log) == 3);
  CHECK(slurp(log).find("row 1") != std::string::npos);
  const auto bad_cfg = s.file("bad.cfg", "vocab_size = many\n");
  CHECK(run("gen-synth --config " + bad_cfg.string(), log) == 3);
  // verification failure
  CHECK(run("verify-theory --mc-tol 1e-6 --out " + (s.dir / "v.json").string(), log) == 4);
  CHECK(slurp(log).find("FAILED") != std::string::npos);
  // i/o error
  CHECK(run("analyze " + (s.dir / "missing.bin").string(), log) == 5);
  CHECK(run("gen-synth --config " + cfg.string() + " --out " + (s.dir / "no/dir/x").string(), log) == 5);
}
