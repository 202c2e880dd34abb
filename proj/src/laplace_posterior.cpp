#include "besov/laplace_posterior.hpp"

#include <algorithm>
#include <cmath>

#include "besov/specfun.hpp"

namespace besov {

using specfun::log_erfcx;
using specfun::log_normal_cdf;
using specfun::log_normal_sf;
using specfun::log_sum_exp;
using specfun::normal_hazard_minus_id;
using specfun::normal_quantile_from_log;
using specfun::truncated_variance_factor;

PriorScale::PriorScale(double beta_, int d_, int l_) : beta(beta_), d(d_), l(l_) {
  if (!(beta > 0.0)) throw std::invalid_argument("PriorScale: beta must be > 0");
  if (d < 1 || l < 1) throw std::invalid_argument("PriorScale: d and l must be >= 1");
  gamma = std::pow(static_cast<double>(l), 0.5 + beta / d);
}

namespace detail {

MixtureCache::MixtureCache(const MarginalPosterior& p) {
  sqrt_n = std::sqrt(static_cast<double>(p.n));
  sigma = 1.0 / sqrt_n;
  // alpha_p = -m_plus/sigma and alpha_m = m_minus/sigma, formed without the
  // intermediate m_{+-} so no precision is lost when x ~ gamma/n.
  alpha_p = p.gamma / sqrt_n - p.x * sqrt_n;
  alpha_m = p.gamma / sqrt_n + p.x * sqrt_n;
  const double lz_p = log_erfcx(alpha_p * specfun::inv_sqrt_two);
  const double lz_m = log_erfcx(alpha_m * specfun::inv_sqrt_two);
  lse = log_sum_exp(lz_p, lz_m);
  log_w_p = lz_p - lse;
  log_w_m = lz_m - lse;
  w_p = 1.0 / (1.0 + std::exp(lz_m - lz_p));
  // log SF(alpha_p) = log(erfcx(alpha_p/sqrt2) e^{-alpha_p^2/2} / 2), same for
  // log Phi(-alpha_m); both fall out of the erfcx logs already computed.
  lsf0_p = lz_p - 0.5 * alpha_p * alpha_p - specfun::log_two;
  lcdf0_m = lz_m - 0.5 * alpha_m * alpha_m - specfun::log_two;
}

double MixtureCache::cdf(double theta) const {
  if (theta <= 0.0) {
    const double u = theta * sqrt_n - alpha_m;  // (theta - m_minus)/sigma
    const double v = std::exp(log_w_m + log_normal_cdf(u) - lcdf0_m);
    return std::min(v, 1.0);
  }
  const double u = theta * sqrt_n + alpha_p;  // (theta - m_plus)/sigma
  const double v = 1.0 - w_p * std::exp(log_normal_sf(u) - lsf0_p);
  return std::clamp(v, 0.0, 1.0);
}

double MixtureCache::quantile_closed_form(double u) const {
  return quantile_log(std::log(u), std::log1p(-u));
}

double MixtureCache::quantile_log(double lu, double luc) const {
  if (lu <= log_w_m) {
    const double lt = lu - log_w_m + lcdf0_m;
    return sigma * (normal_quantile_from_log(lt) + alpha_m);
  }
  const double lt = luc - log_w_p + lsf0_p;
  return sigma * (-normal_quantile_from_log(lt) - alpha_p);
}

}  // namespace detail

double log_normalizer(const MarginalPosterior& p) {
  const detail::MixtureCache c(p);
  const double n = static_cast<double>(p.n);
  return 0.5 * (std::log(M_PI) - specfun::log_two - std::log(n)) - 0.5 * n * p.x * p.x + c.lse;
}

MixtureDecomposition mixture(const MarginalPosterior& p) {
  const detail::MixtureCache c(p);
  const double shift = p.gamma / static_cast<double>(p.n);
  return MixtureDecomposition{c.w_p, p.x - shift, p.x + shift, c.sigma, log_normalizer(p)};
}

namespace {

struct BranchMoments {
  double mean_p, var_p;  // positive branch
  double mean_m, var_m;  // negative branch
  double w_p;
};

BranchMoments branch_moments(const MarginalPosterior& p) {
  const detail::MixtureCache c(p);
  // A branch truncated at 0 with center m = -+ sigma*alpha has mean
  // -+ sigma*(h(alpha) - alpha); the offset form avoids the cancellation of
  // m + sigma*h(alpha) under deep truncation.
  BranchMoments b;
  b.w_p = c.w_p;
  b.mean_p = c.sigma * normal_hazard_minus_id(c.alpha_p);
  b.mean_m = -c.sigma * normal_hazard_minus_id(c.alpha_m);
  const double s2 = c.sigma * c.sigma;
  b.var_p = s2 * truncated_variance_factor(c.alpha_p);
  b.var_m = s2 * truncated_variance_factor(c.alpha_m);
  return b;
}

}  // namespace

double mean(const MarginalPosterior& p) {
  const BranchMoments b = branch_moments(p);
  return b.w_p * b.mean_p + (1.0 - b.w_p) * b.mean_m;
}

double second_moment_about(const MarginalPosterior& p, double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("second_moment_about: c must be finite");
  const BranchMoments b = branch_moments(p);
  const double dp = b.mean_p - c;
  const double dm = b.mean_m - c;
  return b.w_p * (b.var_p + dp * dp) + (1.0 - b.w_p) * (b.var_m + dm * dm);
}

double variance(const MarginalPosterior& p) {
  const BranchMoments b = branch_moments(p);
  const double m = b.w_p * b.mean_p + (1.0 - b.w_p) * b.mean_m;
  return second_moment_about(p, m);
}

double log_density(const MarginalPosterior& p, double theta) {
  const double r = theta - p.x;
  return -0.5 * static_cast<double>(p.n) * r * r - p.gamma * std::abs(theta) - log_normalizer(p);
}

double cdf(const MarginalPosterior& p, double theta) {
  return detail::MixtureCache(p).cdf(theta);
}

double quantile(const MarginalPosterior& p, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must be in (0,1)");
  const detail::MixtureCache c(p);
  double theta = c.quantile_closed_form(u);

  // Newton polish against the mixture CDF, kept inside the branch so the
  // kink of the density at 0 never enters a step.
  double lo, hi;
  if (u <= 1.0 - c.w_p) {
    hi = 0.0;
    lo = std::min(theta, -c.sigma);
    while (c.cdf(lo) > u && std::isfinite(lo)) lo *= 2.0;
  } else {
    lo = 0.0;
    hi = std::max(theta, c.sigma);
    while (c.cdf(hi) < u && std::isfinite(hi)) hi *= 2.0;
  }
  theta = std::clamp(theta, lo, hi);
  const double ld_off = log_normalizer(p);  // log_density without recomputing the cache
  for (int it = 0; it < 60; ++it) {
    const double r = c.cdf(theta) - u;
    if (r > 0.0) hi = theta; else lo = theta;
    if (std::abs(r) <= 1e-15) break;
    const double dtheta = theta - p.x;
    const double logf =
        -0.5 * static_cast<double>(p.n) * dtheta * dtheta - p.gamma * std::abs(theta) - ld_off;
    const double step = -r / std::exp(logf);
    double next = theta + step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == theta) break;
    theta = next;
    if (std::abs(step) <= 1e-15 * (std::abs(theta) + c.sigma) && std::abs(r) <= 1e-13) break;
  }
  return theta;
}

namespace {

// Standard-normal draw truncated to [alpha, inf), returned as offset from
// alpha (always >= 0).
double truncated_std_normal_offset(double alpha, CounterRng& rng) {
  if (alpha <= 4.0) {
    // Inverse CDF through the survival function keeps the deep tail exact.
    const double lsf_a = log_normal_sf(alpha);
    const double t = -normal_quantile_from_log(lsf_a + std::log1p(-rng.uniform()));
    return std::max(0.0, t - alpha);
  }
  // Exponential rejection (Robert-style): propose alpha + Exp(rate), with the
  // rate minimizing the rejection probability.
  const double rate = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
  for (;;) {
    const double e = -std::log(rng.uniform()) / rate;
    const double delta = e - (rate - alpha);
    if (std::log(rng.uniform()) <= -0.5 * delta * delta) return e;
  }
}

}  // namespace

namespace detail {

double sample_cached(const MixtureCache& c, CounterRng& rng) {
  if (rng.uniform() <= c.w_p) return c.sigma * truncated_std_normal_offset(c.alpha_p, rng);
  return -c.sigma * truncated_std_normal_offset(c.alpha_m, rng);
}

}  // namespace detail

double sample(const MarginalPosterior& p, CounterRng& rng) {
  return detail::sample_cached(detail::MixtureCache(p), rng);
}

double sample(const MarginalPosterior& p, std::int64_t seed) {
  CounterRng rng(derive_key({static_cast<std::uint64_t>(seed)}));
  return sample(p, rng);
}

double map_estimate(const MarginalPosterior& p) {
  const double shift = p.gamma / static_cast<double>(p.n);
  const double mag = std::abs(p.x) - shift;
  if (mag <= 0.0) return 0.0;
  return p.x > 0.0 ? mag : -mag;
}

}  // namespace besov
