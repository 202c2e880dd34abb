// Test-only oracles, independent of the library's special-function paths.

#pragma once

#include <cmath>

#include "besov/quadrature.hpp"

namespace besov::test {

/// erfc by direct quadrature of (2/sqrt(pi)) int_z^inf e^{-s^2} ds, composite
/// Gauss-Legendre on [z, z+40]; absolute error well below 1e-15.
inline double erfc_quadrature(double z) {
  const auto& rule = quadrature::gauss_legendre(32);
  const int panels = 160;
  const double width = 40.0 / panels;
  double acc = 0.0;
  for (int p = panels - 1; p >= 0; --p) {
    const double a = z + p * width;
    double panel = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double s = a + 0.5 * width * (rule.nodes[k] + 1.0);
      panel += rule.weights[k] * std::exp(-s * s);
    }
    acc += panel * 0.5 * width;
  }
  return acc * 2.0 / std::sqrt(M_PI);
}

/// Leading terms of the large-z expansion of erfcx, written out directly.
inline double erfcx_asymptotic_oracle(double z) {
  const double u = 1.0 / (2.0 * z * z);
  return (1.0 - u + 3.0 * u * u - 15.0 * u * u * u) / (z * std::sqrt(M_PI));
}

}  // namespace besov::test
