#pragma once

// SPDX-License-Identifier: Apache-2.0

/**
 * @file special_functions.hpp
 * @brief Error function family in double precision.
 *
 * erf/erfc use W. J. Cody's rational Chebyshev approximations (netlib
 * specfun CALERF, 1990 revision) on the three intervals |x| <= 0.46875,
 * 0.46875 < |x| <= 4 and |x| > 4. Published maximum relative error is below
 * 6e-19 in the approximating forms; in IEEE double the achieved absolute
 * error is bounded by a few ulp (< 1e-15 absolute for erf).
 *
 * erf_inv starts from Giles' single-precision approximation ("Approximating
 * the erfinv function", GPU Computing Gems, 2010; |rel err| < 4e-7) and
 * refines with two Halley steps against erf/erfc, giving
 * |erf(erf_inv(y)) - y| <= 1e-15 in practice.
 */

namespace topns::math {

double erf(double x);
double erfc(double x);

/// Inverse of erf on (-1, 1). Throws DomainError for |y| >= 1 or NaN.
double erf_inv(double y);

/// Standard normal CDF, written via erfc for accuracy in the lower tail.
double normal_cdf(double z);

}  // namespace topns::math
