// SPDX-License-Identifier: Apache-2.0

#include "topns/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "topns/error.hpp"

namespace topns::math {

namespace {

// Cody's coefficients, netlib specfun/erf.
constexpr std::array<double, 5> kA = {3.16112374387056560e00, 1.13864154151050156e02, 3.77485237685302021e02,
                                      3.20937758913846947e03, 1.85777706184603153e-1};
constexpr std::array<double, 4> kB = {2.36012909523441209e01, 2.44024637934444173e02, 1.28261652607737228e03,
                                      2.84423683343917062e03};
constexpr std::array<double, 9> kC = {5.64188496988670089e-1, 8.88314979438837594e00, 6.61191906371416295e01,
                                      2.98635138197400131e02, 8.81952221241769090e02, 1.71204761263407058e03,
                                      2.05107837782607147e03, 1.23033935479799725e03, 2.15311535474403846e-8};
constexpr std::array<double, 8> kD = {1.57449261107098347e01, 1.17693950891312499e02, 5.37181101862009858e02,
                                      1.62138957456669019e03, 3.29079923573345963e03, 4.36261909014324716e03,
                                      3.43936767414372164e03, 1.23033935480374942e03};
constexpr std::array<double, 6> kP = {3.05326634961232344e-1, 3.60344899949804439e-1, 1.25781726111229246e-1,
                                      1.60837851487422766e-2, 6.58749161529837803e-4, 1.63153871373020978e-2};
constexpr std::array<double, 5> kQ = {2.56852019228982242e00, 1.87295284992346047e00, 5.27905102951428412e-1,
                                      6.05183413124413191e-2, 2.33520497626869185e-3};

constexpr double kThresh = 0.46875;
constexpr double kXSmall = 1.11e-16;
constexpr double kXBig = 26.543;
constexpr double kSqrtPiInv = 0.56418958354775628695;  // 1/sqrt(pi)

// erf(x) for |x| <= 0.46875
double erf_small(double x) {
  const double y = std::abs(x);
  const double ysq = y > kXSmall ? y * y : 0.0;
  double num = kA[4] * ysq;
  double den = ysq;
  for (int i = 0; i < 3; ++i) {
    num = (num + kA[i]) * ysq;
    den = (den + kB[i]) * ysq;
  }
  return x * (num + kA[3]) / (den + kB[3]);
}

// exp(-y*y) evaluated as exp(-ysq^2) * exp(-(y-ysq)(y+ysq)) with ysq = y rounded down to 1/16,
// which avoids the rounding error of squaring y directly.
double exp_neg_square(double y) {
  const double ysq = std::trunc(y * 16.0) / 16.0;
  const double del = (y - ysq) * (y + ysq);
  return std::exp(-ysq * ysq) * std::exp(-del);
}

// erfc(y) for y > 0.46875
double erfc_large(double y) {
  if (y <= 4.0) {
    double num = kC[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
      num = (num + kC[i]) * y;
      den = (den + kD[i]) * y;
    }
    return exp_neg_square(y) * (num + kC[7]) / (den + kD[7]);
  }
  if (y >= kXBig) return 0.0;
  const double ysq = 1.0 / (y * y);
  double num = kP[5] * ysq;
  double den = ysq;
  for (int i = 0; i < 4; ++i) {
    num = (num + kP[i]) * ysq;
    den = (den + kQ[i]) * ysq;
  }
  const double r = ysq * (num + kP[4]) / (den + kQ[4]);
  return exp_neg_square(y) * (kSqrtPiInv - r) / y;
}

// Giles (2010), single-precision branch; used only as a starting point.
double erf_inv_guess(double y) {
  double w = -std::log((1.0 - y) * (1.0 + y));
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  return p * y;
}

}  // namespace

double erf(double x) {
  if (std::isnan(x)) return x;
  const double y = std::abs(x);
  if (y <= kThresh) return erf_small(x);
  const double r = (0.5 - erfc_large(y)) + 0.5;
  return x < 0.0 ? -r : r;
}

double erfc(double x) {
  if (std::isnan(x)) return x;
  const double y = std::abs(x);
  if (y <= kThresh) return 1.0 - erf_small(x);
  const double r = erfc_large(y);
  return x < 0.0 ? 2.0 - r : r;
}

double erf_inv(double y) {
  if (!(std::abs(y) < 1.0)) throw DomainError("erf_inv requires |y| < 1");
  if (y == 0.0) return y;
  // work on |y| so the tail residual can use erfc without cancellation
  const double a = std::abs(y);
  const double tail = 1.0 - a;  // exact for a >= 0.5 (Sterbenz)
  double x = erf_inv_guess(a);
  for (int iter = 0; iter < 8; ++iter) {
    const double f = a < 0.5 ? erf(x) - a : tail - erfc(x);
    const double dfdx = 2.0 * std::numbers::inv_sqrtpi * std::exp(-x * x);
    // Halley: f'' = -2x f'
    const double step = f / dfdx;
    x -= step / (1.0 + x * step);
    if (std::abs(step) <= 1e-16 * x) break;
  }
  return y < 0.0 ? -x : x;
}

double normal_cdf(double z) { return 0.5 * erfc(-z / std::numbers::sqrt2); }

}  // namespace topns::math
