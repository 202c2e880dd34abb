#include "besov/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "besov/specfun.hpp"

namespace besov::quadrature {

namespace {

GaussLegendre compute_rule(int order) {
  // Roots of the Legendre polynomial by Newton from the Chebyshev-like guess.
  GaussLegendre r;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[order - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double m, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  // The last disjunct is the roundoff floor: once delta sits at the rounding
  // noise of the panel values, further splitting cannot help.
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol ||
      std::abs(delta) <= 1e-15 * (std::abs(left) + std::abs(right)))
    return left + right + delta / 15.0;
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, m, b, fa, fm, fb, whole, abs_tol, max_depth);
}

namespace {

// Knot mesh for exp(-(n/2)(t-x)^2 - gamma|t|). The density mode is the
// soft-thresholded point (one of 0, x - gamma/n, x + gamma/n), so ladders of
// Gaussian widths around all three candidate centers plus the prior scale
// 1/gamma around the kink cover every (n, gamma, x) regime; the mode itself
// is always a knot, which pins the log-scale normalization exactly.
std::vector<double> posterior_knots(std::int64_t n, double gamma, double x) {
  const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
  const double shift = gamma / static_cast<double>(n);
  std::vector<double> k;
  for (double c : {x, x - shift, x + shift, 0.0})
    for (double w : {-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0})
      k.push_back(c + w * sigma);
  for (double c : {-60.0, -20.0, -6.0, -2.0, 2.0, 6.0, 20.0, 60.0}) k.push_back(c / gamma);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

}  // namespace

namespace {

struct NormalizedDensity {
  std::vector<double> knots;
  double peak;
  double nn, gamma, x;

  double g(double t) const {
    const double lf = -0.5 * nn * (t - x) * (t - x) - gamma * std::abs(t);
    return std::exp(lf - peak);
  }

  // int of (t - c)^k g(t) over the mesh, per-segment absolute tolerance tol.
  template <class F>
  double integrate(F&& f, double tol) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      acc += adaptive_simpson([&](double t) { return f(t); }, knots[i], knots[i + 1], tol);
    return acc;
  }

  // z at a tolerance relative to itself (z can be ~1/gamma, far below any
  // fixed absolute tolerance).
  double mass() const {
    auto g0 = [&](double t) { return g(t); };
    const double rough = integrate(g0, 1e-14);
    return integrate(g0, 2e-14 * rough);
  }
};

NormalizedDensity make_density(std::int64_t n, double gamma, double x) {
  NormalizedDensity nd;
  nd.knots = posterior_knots(n, gamma, x);
  nd.nn = static_cast<double>(n);
  nd.gamma = gamma;
  nd.x = x;
  nd.peak = -std::numeric_limits<double>::infinity();
  for (double t : nd.knots) {
    const double lf = -0.5 * nd.nn * (t - x) * (t - x) - gamma * std::abs(t);
    nd.peak = std::max(nd.peak, lf);
  }
  return nd;
}

// Two-pass centered second moment: a rough pass anchors the tolerance so the
// result is relatively accurate even when the value is ~1/gamma^2.
double centered_m2(const NormalizedDensity& nd, double c, double z) {
  auto f = [&](double t) { return (t - c) * (t - c) * nd.g(t); };
  const double rough = nd.integrate(f, 1e-13 * z);
  return nd.integrate(f, 2e-13 * std::max(rough, 1e-280));
}

}  // namespace

PosteriorQuad quad_posterior_stats(std::int64_t n, double gamma, double x) {
  const NormalizedDensity nd = make_density(n, gamma, x);
  const double z = nd.mass();

  // First moment about the mode (soft-thresholded x): the offset integrand is
  // small where the mass is, which keeps the mean tolerance proportional to
  // the posterior sd rather than to |x|.
  const double shift = gamma / nd.nn;
  const double mode = std::abs(x) <= shift ? 0.0 : (x > 0.0 ? x - shift : x + shift);
  const double v_anchor = centered_m2(nd, mode, z) / z;
  const double sd_anchor = std::sqrt(v_anchor);
  const double m1c =
      nd.integrate([&](double t) { return (t - mode) * nd.g(t); }, 1e-12 * z * sd_anchor);

  PosteriorQuad out;
  out.log_Z = nd.peak + std::log(z);
  out.mean = mode + m1c / z;
  out.variance = centered_m2(nd, out.mean, z) / z;
  return out;
}

double quad_second_moment_about(std::int64_t n, double gamma, double x, double c) {
  const NormalizedDensity nd = make_density(n, gamma, x);
  const double z = nd.mass();
  return centered_m2(nd, c, z) / z;
}

}  // namespace besov::quadrature
