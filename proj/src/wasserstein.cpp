#include "besov/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "besov/quadrature.hpp"
#include "besov/specfun.hpp"
#include "besov/summation.hpp"

namespace besov {

namespace {

// Integral of (qa - qb)^2 over [lo, hi] split into `panels` equal panels.
double squared_diff_integral(const QuantileFn& qa, const QuantileFn& qb, double lo, double hi,
                             int panels, const quadrature::GaussLegendre& rule) {
  std::vector<double> panel_vals(panels);
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double u = a + 0.5 * h * (rule.nodes[k] + 1.0);
      const double diff = qa(u) - qb(u);
      acc += rule.weights[k] * diff * diff;
    }
    panel_vals[p] = acc * 0.5 * h;
  }
  return pairwise_sum(panel_vals);
}

}  // namespace

W2Result w2_univariate_full(const QuantileFn& qa, const QuantileFn& qb, const W2Options& opts) {
  const auto& rule = quadrature::gauss_legendre(opts.nodes_per_panel);
  const double lo = opts.clip_delta, hi = 1.0 - opts.clip_delta;

  W2Result out{};
  const double dlo = qa(lo) - qb(lo), dhi = qa(hi) - qb(hi);
  out.tail_bound = opts.clip_delta * (dlo * dlo + dhi * dhi);

  int panels = opts.initial_panels;
  double prev = squared_diff_integral(qa, qb, lo, hi, panels, rule);
  for (int k = 0; k < opts.max_doublings; ++k) {
    panels *= 2;
    const double cur = squared_diff_integral(qa, qb, lo, hi, panels, rule);
    const double change = std::abs(cur - prev);
    out.panels = panels;
    out.rel_change = cur == 0.0 ? 0.0 : change / std::abs(cur);
    prev = cur;
    if (cur == 0.0 || change <= opts.rel_tol * std::abs(cur)) {
      out.value = std::sqrt(std::max(0.0, cur));
      out.converged = true;
      return out;
    }
  }
  throw W2ConvergenceError("w2_univariate: panel doubling budget exhausted",
                           std::sqrt(std::max(0.0, prev)));
}

double w2_univariate(const QuantileFn& qa, const QuantileFn& qb, const W2Options& opts) {
  return w2_univariate_full(qa, qb, opts).value;
}

double w2_to_dirac(const MarginalPosterior& p, double c) {
  return std::sqrt(second_moment_about(p, c));
}

double product_w2_sq(std::span<const double> weights, std::span<const double> per_coord_w2) {
  if (weights.size() != per_coord_w2.size())
    throw std::invalid_argument("product_w2_sq: length mismatch");
  std::vector<double> terms(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    terms[i] = weights[i] * per_coord_w2[i] * per_coord_w2[i];
  return pairwise_sum(terms);
}

double w2_posterior_pair(const MarginalPosterior& a, const MarginalPosterior& b) {
  const detail::MixtureCache ca(a), cb(b);

  // Integrate in v with u = Phi(v): W2^2 = int (Qa(Phi(v)) - Qb(Phi(v)))^2 phi(v) dv.
  // The quantile of each mixture has a curvature jump where its branch weight
  // crosses, so the panel layout splits there.
  constexpr double v_lim = 8.6;  // Phi(-8.6) ~ 4e-18: clipped mass is negligible
  const double v_kink_a =
      specfun::normal_quantile(std::clamp(1.0 - ca.w_p, 1e-17, 1.0 - 1e-17));
  const double v_kink_b =
      specfun::normal_quantile(std::clamp(1.0 - cb.w_p, 1e-17, 1.0 - 1e-17));
  std::vector<double> cuts{-v_lim, std::clamp(v_kink_a, -v_lim, v_lim),
                           std::clamp(v_kink_b, -v_lim, v_lim), v_lim};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto& rule = quadrature::gauss_legendre(16);
  const double inv_sqrt_2pi = 0.39894228040143267794;
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double seg_lo = cuts[s], seg_hi = cuts[s + 1];
    const int panels = std::max(2, static_cast<int>(std::ceil((seg_hi - seg_lo) / 1.5)));
    const double h = (seg_hi - seg_lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = seg_lo + p * h;
      double acc = 0.0;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double v = lo + 0.5 * h * (rule.nodes[k] + 1.0);
        const double lu = specfun::log_normal_cdf(v);
        const double luc = specfun::log_normal_cdf(-v);
        const double diff = ca.quantile_log(lu, luc) - cb.quantile_log(lu, luc);
        acc += rule.weights[k] * diff * diff * inv_sqrt_2pi * std::exp(-0.5 * v * v);
      }
      total += acc * 0.5 * h;
    }
  }
  return std::sqrt(std::max(0.0, total));
}

}  // namespace besov
