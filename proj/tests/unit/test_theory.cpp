#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "topns/error.hpp"
#include "topns/rng.hpp"
#include "topns/special_functions.hpp"
#include "topns/synth.hpp"
#include "topns/theory.hpp"

using namespace topns;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Quadrature oracle for I(t) = integral_t^inf e^x N(x; mu, sigma) dx.
double quadrature_I(double mu, double sigma, double t) {
  auto f = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::exp(x - 0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, t, kInf, 15, 1e-12);
}

}  // namespace

TEST_CASE("erf and erfc agree with the standard library") {
  for (double x = -7.0; x <= 7.0; x += 0.003) {
    CHECK(std::abs(math::erf(x) - std::erf(x)) <= 4.5e-16);
    if (x > -5 && x < 25) CHECK(math::erfc(x) == doctest::Approx(std::erfc(x)).epsilon(1e-13));
  }
  for (double x : {10.0, 20.0, 26.0}) CHECK(math::erfc(x) == doctest::Approx(std::erfc(x)).epsilon(1e-13));
  CHECK(math::erf(1.0) == doctest::Approx(0.8427007929497149).epsilon(1e-15));
  CHECK(math::erf(0.0) == 0.0);
  CHECK(math::erf(kInf) == 1.0);
  CHECK(math::erf(-kInf) == -1.0);
  CHECK(math::erfc(kInf) == 0.0);
  CHECK(std::isnan(math::erf(std::nan(""))));
}

TEST_CASE("erf_inv inverts erf and matches boost") {
  for (double y = -0.999; y <= 0.999; y += 0.001) {
    const double x = math::erf_inv(y);
    CHECK(std::abs(math::erf(x) - y) <= 1e-15);
    CHECK(x == doctest::Approx(boost::math::erf_inv(y)).epsilon(1e-13));
  }
  for (int k = 3; k <= 15; ++k) {
    const double y = 1.0 - std::pow(10.0, -k);
    CHECK(math::erf_inv(y) == doctest::Approx(boost::math::erf_inv(y)).epsilon(1e-12));
    CHECK(math::erf_inv(-y) == -math::erf_inv(y));
  }
  CHECK(math::erf_inv(0.0) == 0.0);
  CHECK_THROWS_AS(math::erf_inv(1.0), DomainError);
  CHECK_THROWS_AS(math::erf_inv(-1.0), DomainError);
  CHECK_THROWS_AS(math::erf_inv(1.5), DomainError);
}

TEST_CASE("normal_cdf") {
  CHECK(math::normal_cdf(0.0) == 0.5);
  CHECK(math::normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(math::normal_cdf(-1.0) == doctest::Approx(0.15865525393145705).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((GaussianParams{0.0, 0.0}.validate()), InvalidParameter);
  CHECK_THROWS_AS((GaussianParams{std::nan(""), 1.0}.validate()), InvalidParameter);
  CHECK_THROWS_AS((UniformParams{0.0, -1.0}.validate()), InvalidParameter);
  CHECK_NOTHROW((UniformParams{0.0, 1.0}.validate()));
}

TEST_CASE("gaussian_threshold examples") {
  const GaussianParams g{0.3, 1.7};
  CHECK(gaussian_threshold(g, 0.5) == doctest::Approx(0.3 + 1.7 * 1.7).epsilon(1e-15));
  // oracle: 1 + sqrt(2) * boost erf_inv(-0.8)
  const double expected = 1.0 + std::numbers::sqrt2 * boost::math::erf_inv(-0.8);
  CHECK(expected == doctest::Approx(-0.2815515655446006).epsilon(1e-14));
  CHECK(gaussian_threshold({0.0, 1.0}, 0.9) == doctest::Approx(expected).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_threshold({0.0, 1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(gaussian_threshold({0.0, 1.0}, 1.0), DomainError);
}

TEST_CASE("uniform_threshold examples") {
  CHECK(uniform_threshold({0.0, std::log(2.0)}, 0.5) == doctest::Approx(std::log(0.75)).epsilon(1e-15));
  CHECK_THROWS_AS(uniform_threshold({0.0, 1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(uniform_threshold({0.0, 1.0}, 1.0), DomainError);
  // threshold stays inside the support
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const double t = uniform_threshold({2.0, 3.0}, p);
    CHECK(t <= 2.0);
    CHECK(t >= -1.0);
  }
}

TEST_CASE("thresholds decrease and top-n-sigma masses increase monotonically") {
  for (double p = 0.01; p < 0.985; p += 0.01) {
    CHECK(gaussian_threshold({0, 1}, p + 0.01) < gaussian_threshold({0, 1}, p));
    CHECK(uniform_threshold({0, 4}, p + 0.01) < uniform_threshold({0, 4}, p));
  }
  for (double n = 0.05; n < 3.4; n += 0.05) {
    CHECK(topnsigma_mass_uniform_bound(1.0, n + 0.05) > topnsigma_mass_uniform_bound(1.0, n));
    CHECK(topnsigma_mass_gaussian(1.0, 3.0, n + 0.05) > topnsigma_mass_gaussian(1.0, 3.0, n));
  }
}

TEST_CASE("nucleus_mass_empirical examples") {
  const LogitVector l{std::log(3.0), std::log(1.0)};
  const auto all = nucleus_mass_empirical(l, -kInf);
  CHECK(all.mass == doctest::Approx(1.0));
  CHECK(all.nucleus_size == 2);
  const auto none = nucleus_mass_empirical(l, 5.0);
  CHECK(none.mass == 0.0);
  CHECK(none.nucleus_size == 0);
  const auto half = nucleus_mass_empirical(l, std::log(2.0));
  CHECK(half.mass == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(half.nucleus_size == 1);
}

TEST_CASE("integral_I closed form matches quadrature") {
  for (double mu : {-2.0, 0.0, 1.5}) {
    for (double sigma : {0.3, 1.0, 2.0}) {
      for (double dt : {-3.0, -1.0, 0.0, 1.0, 2.5}) {
        const double t = mu + dt * sigma;
        CHECK(integral_I({mu, sigma}, t) == doctest::Approx(quadrature_I(mu, sigma, t)).epsilon(1e-8));
      }
      CHECK(integral_I({mu, sigma}, -kInf) == doctest::Approx(std::exp(mu + sigma * sigma / 2)).epsilon(1e-15));
    }
  }
  // oracle: e^{1/2} Phi(1)
  CHECK(integral_I({0.0, 1.0}, 0.0) == doctest::Approx(quadrature_I(0.0, 1.0, 0.0)).epsilon(1e-10));
  CHECK(integral_I({0.0, 1.0}, 0.0) == doctest::Approx(1.3871429788350047).epsilon(1e-14));
}

TEST_CASE("empirical_integral_I counts strictly above t") {
  const std::vector<double> x{0.0, 1.0, 2.0, kNegInf};
  CHECK(empirical_integral_I(x, 1.0) == doctest::Approx(std::exp(2.0) / 4.0));
  CHECK(empirical_integral_I(x, -kInf) == doctest::Approx((1 + std::exp(1.0) + std::exp(2.0)) / 4.0));
}

TEST_CASE("Gaussian round trip recovers p within 0.01 at V = 200000") {
  const GaussianParams g{0.0, 1.0};
  Rng rng(2025);
  const LogitVector l(gaussian_logits(200000, g, rng));
  for (double p : {0.1, 0.25, 0.5, 0.9}) {
    const double mass = nucleus_mass_empirical(l, gaussian_threshold(g, p)).mass;
    CHECK(std::abs(mass - p) <= 0.01);
  }
}

TEST_CASE("uniform round trip recovers p within 0.01 at V = 200000") {
  const UniformParams u{0.0, 4.0};
  Rng rng(2026);
  const LogitVector l(uniform_logits(200000, u, rng));
  for (double p : {0.1, 0.25, 0.5, 0.6, 0.9}) {
    const double mass = nucleus_mass_empirical(l, uniform_threshold(u, p)).mass;
    CHECK(std::abs(mass - p) <= 0.01);
  }
}

TEST_CASE("top-n-sigma Gaussian mass") {
  // at sigma_distance = n the cutoff sits sigma^2 below the weighted centre
  for (double sigma : {0.5, 1.0, 2.0})
    CHECK(topnsigma_mass_gaussian(sigma, 2.0, 2.0) ==
          doctest::Approx(0.5 * (1.0 - std::erf(-sigma / std::numbers::sqrt2))).epsilon(1e-14));
  // oracle: 0.5 * erfc(1 / sqrt(2)) = Phi(-1)
  const double expected = 0.5 * std::erfc(1.0 / std::numbers::sqrt2);
  CHECK(expected == doctest::Approx(0.15865525393145707).epsilon(1e-14));
  CHECK(topnsigma_mass_gaussian(1.0, 3.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  // (10 - 1 - 0.01) / sqrt(2) gives erfc ~ 1.2e-19
  CHECK(topnsigma_mass_gaussian(0.01, 10.0, 1.0) == doctest::Approx(0.5 * std::erfc(8.99 / std::numbers::sqrt2)));
  CHECK(topnsigma_mass_gaussian(0.01, 10.0, 1.0) < 1e-18);
  // gap form: vanishes as sigma -> 0 at a fixed positive gap
  double prev = 1.0;
  for (double sigma : {1.0, 0.5, 0.2, 0.1, 0.05, 0.01}) {
    const double m = topnsigma_mass_gaussian_gap(sigma, 0.5, 1.0);
    CHECK(m < prev);
    prev = m;
  }
  CHECK(prev < 1e-300);
  CHECK(topnsigma_mass_gaussian_gap(2.0, 6.0, 1.0) == doctest::Approx(topnsigma_mass_gaussian(2.0, 3.0, 1.0)));
}

TEST_CASE("top-n-sigma Gaussian mass matches Monte Carlo at sigma-distance 3") {
  Rng rng(9);
  const LogitVector l(gaussian_logits(1000000, {0.0, 1.0}, rng));
  const double mass = nucleus_mass_empirical(l, 2.0).mass;
  CHECK(std::abs(mass - topnsigma_mass_gaussian(1.0, 3.0, 1.0)) <= 0.005);
}

TEST_CASE("uniform bound") {
  // oracle: (1 - e^{-1.9}) / (1 - e^{-2 sqrt(3) 1.9})
  const double expected = -std::expm1(-1.9) / -std::expm1(-2.0 * std::numbers::sqrt3 * 1.9);
  CHECK(expected == doctest::Approx(0.8516111713976531).epsilon(1e-14));
  CHECK(topnsigma_mass_uniform_bound(1.9, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::abs(topnsigma_mass_uniform_bound(1.9, 1.0) - 0.85) <= 0.005);
  for (double sigma : {0.1, 1.0, 5.0})
    CHECK(topnsigma_mass_uniform_bound(sigma, 2.0 * std::numbers::sqrt3) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(topnsigma_mass_uniform_bound(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(topnsigma_mass_uniform_bound(1.0, 4.0), DomainError);
  CHECK_THROWS_AS(topnsigma_mass_uniform_bound(0.0, 1.0), DomainError);

  // exact form equals the bound at a = 2 sqrt(3) sigma and exceeds it for narrower support
  CHECK(topnsigma_mass_uniform(1.9, 1.0, 2.0 * std::numbers::sqrt3 * 1.9) == doctest::Approx(expected));
  CHECK(topnsigma_mass_uniform(1.9, 1.0, 5.0) > expected);
  CHECK(topnsigma_mass_uniform(1.0, 3.0, 2.0) == 1.0);
}

TEST_CASE("uniform exact mass matches Monte Carlo within 0.005") {
  const double sigma = 1.9, width = 2.0 * std::numbers::sqrt3 * sigma;
  Rng rng(77);
  const LogitVector l(uniform_logits(1000000, {0.0, width}, rng));
  const double mass = nucleus_mass_empirical(l, -sigma).mass;
  CHECK(std::abs(mass - topnsigma_mass_uniform(sigma, 1.0, width)) <= 0.005);
}

TEST_CASE("min-p threshold and its uniform limit") {
  CHECK(minp_logit_threshold(3.0, 1.0) == 3.0);
  CHECK(minp_logit_threshold(0.0, 0.1) == doctest::Approx(-2.302585092994046).epsilon(1e-15));
  CHECK_THROWS_AS(minp_logit_threshold(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(minp_logit_threshold(0.0, 1.5), DomainError);
  for (double p : {0.05, 0.1, 0.3}) {
    CHECK(std::abs(uniform_threshold({0.0, 50.0}, 1.0 - p) - minp_logit_threshold(0.0, p)) <= 1e-15);
    for (double a : {10.0, 20.0, 50.0}) {
      const double err = std::abs(uniform_threshold({1.0, a}, 1.0 - p) - minp_logit_threshold(1.0, p));
      CHECK(err <= (std::exp(-a) + 4.0 * std::numeric_limits<double>::epsilon()) / p);
    }
    CHECK(std::abs(uniform_threshold({0.0, 20.0}, 1.0 - p) - minp_logit_threshold(0.0, p)) <= 1e-3);
  }
}
