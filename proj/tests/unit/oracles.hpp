#pragma once

// Independent reference computations used as test oracles. Deliberately
// naive: long double accumulation, no shared code with the library.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct Moments {
  long double max = -std::numeric_limits<long double>::infinity();
  long double mean = 0;
  long double std = 0;
  std::size_t count = 0;
};

inline Moments moments(const std::vector<double>& v) {
  Moments m;
  long double sum = 0;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    ++m.count;
    sum += x;
    if (x > m.max) m.max = x;
  }
  m.mean = sum / static_cast<long double>(m.count);
  long double ss = 0;
  for (double x : v)
    if (std::isfinite(x)) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / static_cast<long double>(m.count));
  return m;
}

inline std::vector<double> softmax(const std::vector<double>& v) {
  long double mx = -std::numeric_limits<long double>::infinity();
  for (double x : v)
    if (std::isfinite(x) && x > mx) mx = x;
  std::vector<long double> e(v.size());
  long double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    e[i] = std::isfinite(v[i]) ? std::exp(static_cast<long double>(v[i]) - mx) : 0.0L;
    s += e[i];
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(e[i] / s);
  return out;
}

/// Tokens with l_i >= max - n * std (population std over finite entries).
inline std::vector<bool> nsigma_mask(const std::vector<double>& v, double n) {
  const Moments m = moments(v);
  const long double cutoff = m.max - n * m.std;
  std::vector<bool> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::isfinite(v[i]) && v[i] >= cutoff;
  return out;
}

/// Half-width of a k-sigma binomial band for a fraction estimated from `draws`.
inline double binomial_band(double p, std::size_t draws, double k = 4.0) {
  return k * std::sqrt(p * (1.0 - p) / static_cast<double>(draws));
}

/// P(X = k) for X ~ Binomial(n, p), via lgamma.
inline double binomial_pmf(std::size_t n, std::size_t k, double p) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  return std::exp(std::lgamma(dn + 1) - std::lgamma(dk + 1) - std::lgamma(dn - dk + 1) + dk * std::log(p) +
                  (dn - dk) * std::log1p(-p));
}

/**
 * Probability that label 0 wins a plurality vote among N draws over labels
 * with probabilities `q` (q[0] is the label of interest), ties broken toward
 * the lowest label index in `order` (order[j] is the numeric label of q[j]).
 * Exhaustive over the multinomial outcomes; fine for 3 labels and N <= 50.
 */
inline double plurality_win_probability(const std::vector<double>& q, const std::vector<int>& order, std::size_t N) {
  double total = 0.0;
  // three-label enumeration
  for (std::size_t a = 0; a <= N; ++a) {
    for (std::size_t b = 0; a + b <= N; ++b) {
      const std::size_t c = N - a - b;
      const double dn = static_cast<double>(N);
      const double la = std::lgamma(dn + 1) - std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(c + 1.0);
      auto term = [](std::size_t k, double p) { return k == 0 ? 0.0 : static_cast<double>(k) * std::log(p); };
      if ((a > 0 && q[0] <= 0) || (b > 0 && q[1] <= 0) || (c > 0 && q[2] <= 0)) continue;
      const double prob = std::exp(la + term(a, q[0]) + term(b, q[1]) + term(c, q[2]));
      const std::size_t counts[3] = {a, b, c};
      bool wins = true;
      for (int j = 1; j < 3; ++j) {
        if (counts[j] > a || (counts[j] == a && order[j] < order[0])) wins = false;
      }
      if (a == 0) wins = false;
      if (wins) total += prob;
    }
  }
  return total;
}

}  // namespace oracle
