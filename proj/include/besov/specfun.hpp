// Special functions for Gaussian-Laplace convolution normalizers.
//
// Everything here is evaluated so that no intermediate quantity overflows
// for the argument ranges produced by the posterior machinery: gamma scales
// grow polynomially in the coefficient index while exp(-n x^2 / 2) factors
// underflow long before the normalizers lose meaning, so the normalizer
// path works with log_erfcx throughout.

#pragma once

#include <cmath>
#include <stdexcept>

namespace besov::specfun {

inline constexpr double sqrt_pi = 1.7724538509055160273;
inline constexpr double sqrt_two = 1.4142135623730950488;
inline constexpr double inv_sqrt_two = 0.70710678118654752440;
inline constexpr double log_two = 0.69314718055994530942;

/// Complementary error function (2/sqrt(pi)) * int_z^inf exp(-s^2) ds.
/// Throws std::domain_error on non-finite input.
double erfc(double z);

/// Scaled complementary error function exp(z^2) * erfc(z). Stays finite for
/// arbitrarily large positive z (asymptotically 1/(z sqrt(pi))); for large
/// negative z the true value exceeds the double range and +inf is returned.
double erfcx(double z);

/// log(erfcx(z)), finite for every finite z. This is the workhorse of the
/// posterior normalizer: for z << 0 it equals z^2 + log(2 - erfc(-z)) and
/// never overflows.
double log_erfcx(double z);

/// log(exp(a) + exp(b)) without overflow. Inputs may be -inf.
double log_sum_exp(double a, double b);

// Gaussian CDF helpers, thin wrappers over erfc / log_erfcx.
inline double normal_cdf(double z) { return 0.5 * erfc(-z * inv_sqrt_two); }
inline double normal_sf(double z) { return 0.5 * erfc(z * inv_sqrt_two); }

/// log Phi(z), stable for z down to -1e8 and beyond.
double log_normal_cdf(double z);
inline double log_normal_sf(double z) { return log_normal_cdf(-z); }

/// Inverse standard normal CDF (Wichura's AS241 rational approximations).
/// Accurate to ~1 ulp over the full double range of p in (0,1).
double normal_quantile(double p);

/// z such that log Phi(z) = lp, for lp <= log(1/2). Handles lp far below
/// the underflow threshold of p itself (needed when inverting truncated
/// branches whose conditional masses underflow).
double normal_quantile_from_log(double lp);

/// Hazard rate of the standard normal, phi(z) / (1 - Phi(z)).
/// Evaluates as sqrt(2/pi) / erfcx(z / sqrt(2)); no cancellation anywhere.
double normal_hazard(double z);

/// normal_hazard(z) - z, computed without the catastrophic cancellation the
/// direct difference suffers for large z (the two agree to O(1/z)). Used by
/// the deep-truncation moment formulas.
double normal_hazard_minus_id(double z);

/// Relative variance 1 + z*h(z) - h(z)^2 of a standard normal truncated to
/// [z, inf), h = normal_hazard. Direct evaluation cancels like 1/z^2; this
/// routine switches to a continued-fraction form for large z.
double truncated_variance_factor(double z);

}  // namespace besov::specfun
