// Quadrature machinery: Gauss-Legendre rules, adaptive Simpson, and a
// log-domain integrator for densities whose natural scale underflows. The
// posterior-stat routine integrates the raw exponent on a knot mesh and is
// the independent cross-check route for the closed-form normalizer and
// moments.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace besov::quadrature {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Nodes/weights of the order-point rule, computed once per order and cached.
const GaussLegendre& gauss_legendre(int order);

/// Adaptive Simpson on [a, b]. Tolerance is absolute on the integral value.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 48);

struct PosteriorQuad {
  double log_Z;        // log of int exp(-(n/2)(t-x)^2 - gamma |t|) dt
  double mean;
  double variance;
};

/// Moments of the coefficient posterior by direct integration of the
/// exponent; shares no code path with the erfcx-based closed forms.
PosteriorQuad quad_posterior_stats(std::int64_t n, double gamma, double x);

/// Same oracle for E[(theta - c)^2].
double quad_second_moment_about(std::int64_t n, double gamma, double x, double c);

}  // namespace besov::quadrature
