#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "topns/error.hpp"
#include "topns/harness/analyze.hpp"
#include "topns/samplers.hpp"
#include "topns/synth.hpp"

using namespace topns;

TEST_CASE("MixtureSpec validation") {
  MixtureSpec ok;
  CHECK_NOTHROW(ok.validate());

  MixtureSpec s = ok;
  s.informative_offsets = {0.1};
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s.informative_offsets = {0.0, 0.5, 0.2};
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s.informative_offsets = {};
  CHECK_THROWS_AS(s.validate(), InvalidParameter);

  s = ok;
  s.vocab_size = 1;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s = ok;
  s.target_max = -1.0;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s = ok;
  s.noise.sigma = 0.0;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
  s = ok;
  s.uniform_width = -1.0;
  CHECK_THROWS_AS(s.validate(), InvalidParameter);
}

TEST_CASE("generate: single spike over tiny noise") {
  MixtureSpec s;
  s.vocab_size = 5;
  s.noise = {0.0, 0.01};
  s.informative_offsets = {0.0};
  s.target_max = 10.0;
  const LogitVector l = generate(s);
  CHECK(l[0] == 10.0);
  for (std::size_t i = 1; i < 5; ++i) CHECK(std::abs(l[i]) < 0.1);
  Rng rng(0);
  CHECK(sample(l, SamplerSpec::greedy(), rng) == 0);
}

TEST_CASE("generate: sigma-distance near 10 at V = 100000 and deterministic per seed") {
  MixtureSpec s;
  s.vocab_size = 100000;
  s.noise = {0.0, 1.0};
  s.target_max = 10.0;
  s.seed = 42;
  const LogitVector a = generate(s);
  const LogitStats st = compute_stats(a);
  CHECK(st.sigma_distance >= 9.5);
  CHECK(st.sigma_distance <= 10.5);
  CHECK(generate(s) == a);
  s.seed = 43;
  CHECK(!(generate(s) == a));
}

TEST_CASE("generate: informative tokens hold the top positions") {
  MixtureSpec s;
  s.vocab_size = 2000;
  s.informative_offsets = {0.0, 0.5, 1.0, 1.0, 2.0};
  s.target_max = 4.5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    s.seed = seed;
    const LogitVector l = generate(s);
    for (std::size_t j = 0; j < 5; ++j) CHECK(l[j] == s.target_max - s.informative_offsets[j]);
    const double lowest_informative = l[4];
    for (std::size_t i = 5; i < l.size(); ++i) CHECK(l[i] < lowest_informative);
  }
}

TEST_CASE("generate: uniform-width informative mode stays inside its band") {
  MixtureSpec s;
  s.vocab_size = 500;
  s.informative_offsets = std::vector<double>(10, 0.0);
  s.uniform_width = 2.0;
  s.target_max = 9.0;
  const LogitVector l = generate(s);
  CHECK(l[0] == 9.0);
  for (std::size_t j = 1; j < 10; ++j) {
    CHECK(l[j] <= 9.0);
    CHECK(l[j] >= 7.0);
  }
  CHECK(argmax(l) == 0);
}

TEST_CASE("noise region passes a normality sanity check") {
  MixtureSpec s;
  s.vocab_size = 200001;
  s.noise = {1.5, 2.0};
  s.target_max = 30.0;
  s.seed = 7;
  const LogitVector l = generate(s);
  const std::vector<double> noise(l.begin() + 1, l.end());
  const oracle::Moments m = oracle::moments(noise);
  const double v = static_cast<double>(noise.size());
  CHECK(std::abs(static_cast<double>(m.mean) - 1.5) <= 4.0 * 2.0 / std::sqrt(v));
  CHECK(std::abs(static_cast<double>(m.std) / 2.0 - 1.0) <= 0.02);
}

TEST_CASE("generate_sequence tracks the schedule") {
  MixtureSpec s;
  s.vocab_size = 5000;
  s.noise = {0.0, 1.0};
  s.seed = 3;
  const std::vector<double> sched{12, 12, 12};
  const auto seq = generate_sequence(s, 3, sched);
  REQUIRE(seq.size() == 3);
  for (const auto& l : seq) {
    const double d = compute_stats(l).sigma_distance;
    CHECK(d >= 11.5);
    CHECK(d <= 12.5);
  }
  CHECK(!(seq[0] == seq[1]));
}

TEST_CASE("generate_sequence: low sigma-distance widens the nucleus") {
  MixtureSpec s;
  s.vocab_size = 1000;
  s.noise = {0.0, 1.0};
  s.informative_offsets = {0.0, 0.2, 0.4, 0.6};
  s.target_max = 10.0;
  s.seed = 11;
  const std::vector<double> five{5};
  const auto seq = generate_sequence(s, 1, five);
  // brute-force mask on the generated vector
  const std::vector<double> x(seq[0].begin(), seq[0].end());
  const auto mask = oracle::nsigma_mask(x, 1.0);
  CHECK(std::count(mask.begin(), mask.end(), true) >= 4);
  CHECK(mask_top_nsigma(seq[0], 1.0, 1.0).size() >= 4);

  MixtureSpec spike = s;
  spike.informative_offsets = {0.0};
  const std::vector<double> twenty{20};
  const auto seq20 = generate_sequence(spike, 1, twenty);
  CHECK(mask_top_nsigma(seq20[0], 1.0, 1.0).size() == 1);
}

TEST_CASE("generate_sequence rejects infeasible schedules") {
  MixtureSpec s;
  const std::vector<double> low{0.5};
  CHECK_THROWS_AS(generate_sequence(s, 1, low), InvalidParameter);
  const std::vector<double> two{5, 6};
  CHECK_THROWS_AS(generate_sequence(s, 1, two), InvalidParameter);
  CHECK_THROWS_AS(generate_sequence(s, 0, {}), InvalidParameter);
  // sigma-distance is capped near sqrt(V - 1) for a single spike
  s.vocab_size = 10;
  const std::vector<double> huge{50};
  CHECK_THROWS_AS(generate_sequence(s, 1, huge), InvalidParameter);
}

TEST_CASE("a 5 to 20 sweep shows nucleus size falling with sigma-distance") {
  MixtureSpec s;
  s.vocab_size = 20000;
  s.noise = {0.0, 1.0};
  s.informative_offsets.clear();
  for (int j = 0; j <= 30; ++j) s.informative_offsets.push_back(0.1 * j);
  s.target_max = 10.0;
  s.seed = 2024;
  const auto sched = linear_schedule(5.0, 20.0, 100);
  const auto seq = generate_sequence(s, 100, sched);
  std::vector<double> d, size;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const double realized = compute_stats(seq[i]).sigma_distance;
    CHECK(std::abs(realized - sched[i]) <= 0.5);
    d.push_back(realized);
    size.push_back(static_cast<double>(mask_top_nsigma(seq[i], 1.0, 1.0).size()));
  }
  CHECK(harness::spearman(d, size) <= -0.8);
}

TEST_CASE("linear_schedule endpoints") {
  const auto s = linear_schedule(5.0, 20.0, 4);
  CHECK(s == std::vector<double>{5.0, 10.0, 15.0, 20.0});
  CHECK(linear_schedule(3.0, 9.0, 1) == std::vector<double>{3.0});
}

TEST_CASE("gaussian_logits and uniform_logits respect their supports") {
  Rng rng(1);
  const auto u = uniform_logits(10000, {2.0, 3.0}, rng);
  CHECK(*std::max_element(u.begin(), u.end()) <= 2.0);
  CHECK(*std::min_element(u.begin(), u.end()) >= -1.0);
  const auto g = gaussian_logits(10000, {5.0, 0.5}, rng);
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / 10000.0;
  CHECK(std::abs(mean - 5.0) < 4.0 * 0.5 / 100.0);
}
