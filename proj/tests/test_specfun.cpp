#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "besov/specfun.hpp"
#include "oracles.hpp"

using namespace besov;

TEST_CASE("erfc basics") {
  CHECK(specfun::erfc(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  // reflection identity at z = 0.7
  CHECK(specfun::erfc(-0.7) == doctest::Approx(2.0 - specfun::erfc(0.7)).epsilon(1e-15));
  CHECK_THROWS_AS(specfun::erfc(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS_AS(specfun::erfc(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("erfc against quadrature of the defining integral") {
  for (double z = -6.0; z <= 6.0; z += 0.31) {
    const double oracle = test::erfc_quadrature(z);
    CHECK(std::abs(specfun::erfc(z) - oracle) <= 1e-14);
  }
  CHECK(specfun::erfc(1.0) == doctest::Approx(0.15729920705028513).epsilon(1e-13));
}

TEST_CASE("erfc monotone non-increasing on increasing grids") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int rep = 0; rep < 200; ++rep) {
    double a = u(gen), b = u(gen);
    if (a > b) std::swap(a, b);
    CHECK(specfun::erfc(a) >= specfun::erfc(b));
  }
}

TEST_CASE("erfcx values and branches") {
  CHECK(specfun::erfcx(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  // cross-check against exp(z^2) erfc(z) at moderate z (both representable)
  const double direct5 = std::exp(25.0) * specfun::erfc(5.0);
  CHECK(specfun::erfcx(5.0) == doctest::Approx(direct5).epsilon(1e-12));
  // asymptotic regime
  CHECK(specfun::erfcx(1e6) ==
        doctest::Approx(1.0 / (1e6 * std::sqrt(M_PI))).epsilon(1e-10));
  CHECK(specfun::erfcx(1e8) ==
        doctest::Approx(test::erfcx_asymptotic_oracle(1e8)).epsilon(1e-13));
  CHECK(std::isfinite(specfun::erfcx(1e8)));
  CHECK_THROWS_AS(specfun::erfcx(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("erfcx branch consistency across the seams") {
  // Continued-fraction and direct branches must agree near z = 4, the
  // asymptotic branch near z = 30.
  for (double z : {3.9, 3.99999, 4.0, 4.00001, 4.3, 29.9, 30.0, 30.1}) {
    const double lhs = specfun::erfcx(z) * std::exp(-z * z);
    const double rhs = specfun::erfc(z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("erfcx * exp(-z^2) = erfc where representable") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-5.0, 26.0);
  for (int rep = 0; rep < 300; ++rep) {
    const double z = u(gen);
    const double lhs = specfun::erfcx(z) * std::exp(-z * z);
    CHECK(lhs == doctest::Approx(specfun::erfc(z)).epsilon(1e-12));
  }
}

TEST_CASE("erfcx strictly decreasing on [0, inf)") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (int rep = 0; rep < 300; ++rep) {
    double a = u(gen), b = u(gen);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    CHECK(specfun::erfcx(a) > specfun::erfcx(b));
  }
}

TEST_CASE("log_erfcx matches log(erfcx) and stays finite far left") {
  for (double z : {-20.0, -3.0, 0.0, 1.5, 40.0})
    CHECK(specfun::log_erfcx(z) == doctest::Approx(std::log(specfun::erfcx(z))).epsilon(1e-13));
  const double v = specfun::log_erfcx(-1000.0);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(1e6 + std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("log_sum_exp") {
  CHECK(specfun::log_sum_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(specfun::log_sum_exp(ninf, 3.25) == 3.25);
  CHECK(specfun::log_sum_exp(ninf, ninf) == ninf);
  // shifted-scale oracle
  CHECK(specfun::log_sum_exp(710.0, 700.0) ==
        doctest::Approx(710.0 + std::log1p(std::exp(-10.0))).epsilon(1e-15));
  CHECK_THROWS_AS(specfun::log_sum_exp(std::numeric_limits<double>::infinity(), 0.0),
                  std::domain_error);
}

TEST_CASE("normal quantile round trips through the erfc-based cdf") {
  for (double p : {1e-300, 1e-16, 1e-8, 1e-3, 0.25, 0.5, 0.75, 1.0 - 1e-8, 1.0 - 1e-16}) {
    const double z = specfun::normal_quantile(p);
    if (p <= 0.5)
      CHECK(specfun::normal_cdf(z) == doctest::Approx(p).epsilon(1e-12));
    else
      CHECK(specfun::normal_sf(z) == doctest::Approx(1.0 - p).epsilon(1e-11));
  }
  CHECK_THROWS_AS(specfun::normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(specfun::normal_quantile(1.0), std::domain_error);
}

TEST_CASE("normal_quantile_from_log reaches depths p itself cannot represent") {
  for (double lp : {-0.2, -0.6, -5.0, -100.0, -800.0, -1e4, -1e6}) {
    const double z = specfun::normal_quantile_from_log(lp);
    CHECK(specfun::log_normal_cdf(z) == doctest::Approx(lp).epsilon(1e-11));
  }
}

TEST_CASE("hazard helpers agree with their definitions") {
  for (double z : {-8.0, -1.0, 0.0, 2.0, 9.9, 10.1, 50.0, 1e4}) {
    const double h = specfun::normal_hazard(z);
    if (z < 30.0) {
      const double direct =
          std::exp(-0.5 * z * z) / (std::sqrt(2 * M_PI) * specfun::normal_sf(z));
      CHECK(h == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(specfun::normal_hazard_minus_id(z) > 0.0);
    // variance factor of a truncated normal lies in (0, 1] for z >= 0
    const double v = specfun::truncated_variance_factor(z);
    CHECK(v > 0.0);
    if (z >= 0.0) CHECK(v <= 1.0 + 1e-12);
  }
  // deep-truncation asymptotics: v ~ 1/z^2, h - z ~ 1/z
  CHECK(specfun::truncated_variance_factor(1e4) == doctest::Approx(1e-8).epsilon(1e-3));
  CHECK(specfun::normal_hazard_minus_id(1e4) == doctest::Approx(1e-4).epsilon(1e-3));
}

TEST_CASE("continued-fraction forms agree with the direct formulas") {
  // Above z = 10 the library switches to the cancellation-free continued
  // fraction; the direct difference still has ~z^2 * eps of absolute error,
  // which bounds the tolerance here.
  for (double z : {10.0000001, 12.0, 20.0, 35.0}) {
    const double direct = specfun::normal_hazard(z) - z;
    CHECK(specfun::normal_hazard_minus_id(z) == doctest::Approx(direct).epsilon(1e-11));
    const double h = specfun::normal_hazard(z);
    const double v_direct = 1.0 + z * h - h * h;
    CHECK(specfun::truncated_variance_factor(z) == doctest::Approx(v_direct).epsilon(1e-8));
  }
}
