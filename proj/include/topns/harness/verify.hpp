#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file verify.hpp
 * @brief Self-check of the sampler invariants and the closed-form theory.
 *
 * Every check reports the observed error against its tolerance; margin is
 * tolerance - error, so a negative margin is a failure. Exact checks (masks,
 * limits, closed forms) have fixed tolerances. Monte Carlo checks use the
 * `mc` family, which can be tightened to demonstrate their stochastic nature.
 * The report depends only on the seed: no timings, fixed check order.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace topns::harness {

struct Tolerances {
  double mass_abs = 0.01;           ///< Monte Carlo nucleus mass, absolute
  double integral_rel = 0.01;       ///< Monte Carlo I(t), relative
  double uniform_mass_abs = 0.005;  ///< Monte Carlo uniform-case mass, absolute
  double bound_abs = 0.005;         ///< closed-form bound vs. the quoted 0.85
  double limit_abs = 1e-3;          ///< min-p limit of the uniform threshold
  double erf_abs = 1e-14;           ///< erf(erf_inv(y)) - y

  /// Replaces every Monte Carlo tolerance with `tol`.
  void set_monte_carlo(double tol);
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double expected = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  double margin = 0.0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::vector<std::string> failed() const;
};

VerifyReport verify_theory(const Tolerances& tol, std::uint64_t seed, std::size_t threads = 0);

nlohmann::json report_to_json(const VerifyReport& report);

}  // namespace topns::harness
