// Marginal posterior of one coefficient under a Laplace prior and a Gaussian
// likelihood:
//
//   pi(theta | x) = exp(-(n/2)(theta - x)^2 - gamma |theta|) / Z(x).
//
// Completing the square on each half-line shows the density is a two-piece
// truncated-Gaussian mixture, and the normalizer has the closed form
//
//   Z(x) = sqrt(pi/(2n)) e^{-n x^2/2} [erfcx(z-) + erfcx(z+)],
//   z_{-+} = gamma/sqrt(2n) -+ x sqrt(n/2).
//
// Derivation: on theta > 0 the exponent is -(n/2)(theta - m+)^2 - gamma x
// + gamma^2/(2n) with m+ = x - gamma/n, so that half integrates to
// sqrt(pi/(2n)) e^{gamma^2/(2n) - gamma x} erfc(-m+ sqrt(n/2)); writing the
// erfc argument as z- and noting z-^2 = gamma^2/(2n) - gamma x + n x^2/2
// turns the prefactor into e^{-n x^2/2} e^{z-^2}, i.e. the erfcx form. The
// theta < 0 half is the mirror image with z+. Multiplying out the erfcx
// recovers the e^{gamma^2/(2n)} [e^{-gamma x} erfc(..) + e^{gamma x}
// erfc(..)] form, which tests verify numerically; the erfcx form is the one
// that survives gamma^2/(2n) > 709.
//
// All mass computations run through log_erfcx so that no regime of
// (n, gamma, x) overflows.

#pragma once

#include <cstdint>
#include <stdexcept>

#include "besov/rng.hpp"

namespace besov {

/// Prior scale of coefficient l: gamma_l = l^{1/2 + beta/d}.
struct PriorScale {
  double beta;
  int d;
  int l;
  double gamma;

  PriorScale(double beta_, int d_, int l_);
};

struct MarginalPosterior {
  std::int64_t n;
  double gamma;
  double x;

  MarginalPosterior(std::int64_t n_, double gamma_, double x_) : n(n_), gamma(gamma_), x(x_) {
    if (n < 1) throw std::invalid_argument("MarginalPosterior: n must be >= 1");
    if (!(gamma > 0.0)) throw std::invalid_argument("MarginalPosterior: gamma must be > 0");
    if (!std::isfinite(x)) throw std::invalid_argument("MarginalPosterior: x must be finite");
  }
};

/// Two-piece decomposition: with probability w_plus the coefficient follows
/// N(m_plus, sd^2) truncated to [0,inf), otherwise N(m_minus, sd^2) truncated
/// to (-inf,0].
struct MixtureDecomposition {
  double w_plus;
  double m_plus;   // x - gamma/n
  double m_minus;  // x + gamma/n
  double sd;       // n^{-1/2}
  double log_Z;

  double w_minus() const { return 1.0 - w_plus; }
};

double log_normalizer(const MarginalPosterior& p);
MixtureDecomposition mixture(const MarginalPosterior& p);

double mean(const MarginalPosterior& p);
double variance(const MarginalPosterior& p);
/// E[(theta - c)^2] = variance + (mean - c)^2; this is the squared
/// 2-Wasserstein distance to the point mass at c.
double second_moment_about(const MarginalPosterior& p, double c);

double log_density(const MarginalPosterior& p, double theta);
double cdf(const MarginalPosterior& p, double theta);

/// Inverse CDF. Branch-local closed-form inversion plus a Newton polish with
/// bisection fallback; |cdf(quantile(u)) - u| <= 1e-12. Throws on u outside
/// (0,1).
double quantile(const MarginalPosterior& p, double u);

/// Exact draw: branch by w_plus, then a one-sided truncated normal via
/// inverse CDF, or exponential rejection once the truncation point sits more
/// than 4 sd into the tail.
double sample(const MarginalPosterior& p, CounterRng& rng);
double sample(const MarginalPosterior& p, std::int64_t seed);

/// Posterior mode: soft thresholding sign(x) max(|x| - gamma/n, 0).
double map_estimate(const MarginalPosterior& p);

namespace detail {

// Cached per-posterior quantities for bulk cdf/quantile evaluation.
struct MixtureCache {
  double sqrt_n, sigma;
  double alpha_p, alpha_m;  // truncation points of the two branches, in sd units
  double w_p;
  double log_w_p, log_w_m;
  double lcdf0_m;  // log Phi(-alpha_m): untruncated mass of the negative branch piece
  double lsf0_p;   // log SF(alpha_p):  untruncated mass of the positive branch piece
  double lse;      // log(erfcx(z-) + erfcx(z+))

  explicit MixtureCache(const MarginalPosterior& p);
  double cdf(double theta) const;
  double quantile_closed_form(double u) const;  // no polish; used by quadratures
  // Quantile from (log u, log(1-u)); keeps both tails exact when u itself
  // would round to 0 or 1.
  double quantile_log(double lu, double luc) const;
};

/// sample() with the per-posterior constants precomputed; for bulk draws.
double sample_cached(const MixtureCache& c, CounterRng& rng);

}  // namespace detail

}  // namespace besov
