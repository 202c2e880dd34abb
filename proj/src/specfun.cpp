#include "besov/specfun.hpp"

#include <cmath>
#include <limits>

namespace besov::specfun {

namespace {

void require_finite(double z, const char* who) {
  if (!std::isfinite(z)) throw std::domain_error(std::string(who) + ": non-finite argument");
}

// Tail of the classical continued fraction for 1/(sqrt(pi)*erfcx(z)),
//   1/(sqrt(pi)*erfcx(z)) = z + (1/2)/(z + 1/(z + (3/2)/(z + 2/(z + ...)))),
// evaluated backward from term `nterms` down to term `first` (a_k = k/2).
double cf_tail(double z, int first, int nterms) {
  double t = 0.0;
  for (int k = nterms; k >= first; --k) t = (0.5 * k) / (z + t);
  return t;
}

// erfcx on [4, 30] via the continued fraction above.
double erfcx_cf(double z) {
  const int n = z < 6.0 ? 64 : (z < 10.0 ? 40 : 24);
  return 1.0 / (sqrt_pi * (z + cf_tail(z, 1, n)));
}

// erfcx for z > 30: asymptotic series 1/(z sqrt(pi)) * sum (-1)^k (2k-1)!!/(2z^2)^k.
double erfcx_asym(double z) {
  const double u = 1.0 / (2.0 * z * z);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 12; ++k) {
    term *= -(2.0 * k - 1.0) * u;
    sum += term;
    if (std::abs(term) < 1e-18 * sum) break;
  }
  return sum / (z * sqrt_pi);
}

double erfcx_nonneg(double z) {
  if (z < 4.0) return std::exp(z * z) * std::erfc(z);
  if (z <= 30.0) return erfcx_cf(z);
  return erfcx_asym(z);
}

}  // namespace

double erfc(double z) {
  require_finite(z, "erfc");
  return std::erfc(z);
}

double erfcx(double z) {
  require_finite(z, "erfcx");
  if (z >= 0.0) return erfcx_nonneg(z);
  // erfcx(-z) = 2 exp(z^2) - erfcx(z); overflows to +inf below z ~ -26.6,
  // which is the correct rounding of a value outside the double range.
  return 2.0 * std::exp(z * z) - erfcx_nonneg(-z);
}

double log_erfcx(double z) {
  require_finite(z, "log_erfcx");
  if (z >= -26.0) return std::log(erfcx(z));
  // erfc(z) = 2 - erfc(-z), and erfc(-z) <= erfc(26) ~ 1e-296 here.
  return z * z + std::log(2.0 - std::erfc(-z));
}

double log_sum_exp(double a, double b) {
  if (std::isnan(a) || std::isnan(b) || a == std::numeric_limits<double>::infinity() ||
      b == std::numeric_limits<double>::infinity())
    throw std::domain_error("log_sum_exp: arguments must be finite or -inf");
  if (std::isinf(a)) return b;  // a = -inf
  if (std::isinf(b)) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_normal_cdf(double z) {
  // Phi(z) = erfc(-z/sqrt(2))/2 = erfcx(-z/sqrt(2)) exp(-z^2/2) / 2.
  const double t = -z * inv_sqrt_two;
  return log_erfcx(t) - 0.5 * z * z - log_two;
}

double normal_hazard(double z) {
  const double e = erfcx(z * inv_sqrt_two);
  if (std::isinf(e)) return 0.0;  // truncation point far in the left tail
  return 0.79788456080286535588 / e;  // sqrt(2/pi) / erfcx
}

double normal_hazard_minus_id(double z) {
  if (z < 10.0) return normal_hazard(z) - z;
  const double w = z * inv_sqrt_two;
  return sqrt_two * cf_tail(w, 1, w < 40.0 ? 40 : 20);
}

double truncated_variance_factor(double z) {
  if (z < 10.0) {
    const double h = normal_hazard(z);
    return 1.0 + z * h - h * h;
  }
  // 1 - 2 R dR with R = w + dR, dR = (1/2)/(w + dR2) collapses to
  // [dR2 (w + dR2) - 1/2] / (w + dR2)^2, free of the 1/z^2 cancellation.
  const double w = z * inv_sqrt_two;
  const double dr2 = cf_tail(w, 2, w < 40.0 ? 40 : 20);
  const double q = w + dr2;
  return (dr2 * q - 0.5) / (q * q);
}

// AS241 (Wichura): rational approximations for the normal quantile.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -z : z;
}

double normal_quantile_from_log(double lp) {
  if (!(lp <= 0.0) || std::isnan(lp)) throw std::domain_error("normal_quantile_from_log: lp must be <= 0");
  if (lp > -700.0) return normal_quantile(std::exp(lp));
  // Far tail: solve log Phi(-y) = lp. Fixed point of the leading asymptotics,
  // then Newton with the exact hazard.
  double y = std::sqrt(-2.0 * lp);
  for (int i = 0; i < 4; ++i)
    y = std::sqrt(-2.0 * (lp + std::log(y) + 0.91893853320467274178));  // log sqrt(2 pi)
  for (int i = 0; i < 2; ++i) {
    const double g = log_normal_sf(y) - lp;
    y += g / normal_hazard(y);
  }
  return -y;
}

}  // namespace besov::specfun
