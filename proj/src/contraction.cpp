#include "besov/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "besov/parallel.hpp"
#include "besov/quadrature.hpp"
#include "besov/specfun.hpp"
#include "besov/summation.hpp"
#include "besov/wasserstein.hpp"

namespace besov {

void ExperimentConfig::validate() const {
  if (d < 1) throw std::invalid_argument("config: d must be >= 1");
  if (!(beta > 0.5 * d)) throw std::invalid_argument("config: beta must exceed d/2");
  if (!(s >= 0.0 && s < beta - 0.5 * d))
    throw std::invalid_argument("config: s must lie in [0, beta - d/2)");
  if (n_grid.size() < 4)
    throw std::invalid_argument("config: n_grid needs at least 4 points for slope fitting");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw std::invalid_argument("config: n must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("config: n_grid must be strictly increasing");
  }
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (mc_draws < 1) throw std::invalid_argument("config: mc_draws must be >= 1");
  if (l_max < 0) throw std::invalid_argument("config: l_max must be >= 0");
  if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
    throw std::invalid_argument("config: tail_tolerance must be in (0,1)");
  if (truth.d != d) throw std::invalid_argument("config: truth dimension must match d");
}

int ExperimentConfig::effective_l_max() const {
  if (l_max > 0) return l_max;
  const double n_max = static_cast<double>(n_grid.back());
  return static_cast<int>(std::ceil(8.0 * std::pow(n_max, d / (2.0 * beta + d))));
}

double default_M_n(std::int64_t n) {
  return std::max(1.0, std::log(static_cast<double>(n)));
}

Thresholds thresholds(std::int64_t n, double beta, int d, double M_n) {
  if (n < 1 || !(beta > 0.5 * d) || !(M_n >= 1.0))
    throw std::invalid_argument("thresholds: need n >= 1, beta > d/2, M_n >= 1");
  const double expo = (2.0 * beta + d) / d;
  const double two_n = 2.0 * static_cast<double>(n);
  auto reaches = [&](std::int64_t L) { return std::pow(static_cast<double>(L), expo) >= two_n; };
  std::int64_t L = std::max<std::int64_t>(1, std::llround(std::pow(two_n, 1.0 / expo)));
  while (!reaches(L)) ++L;
  while (L > 1 && reaches(L - 1)) --L;
  const double j = std::pow(static_cast<double>(n) / M_n, d / (2.0 * beta + d));
  return Thresholds{static_cast<int>(std::max<std::int64_t>(1, std::llround(j))),
                    static_cast<int>(L)};
}

RateFit rate_fit(std::span<const std::pair<double, double>> n_and_value,
                 double theoretical_exponent) {
  if (n_and_value.size() < 4) throw std::invalid_argument("rate_fit: need at least 4 points");
  const auto m = static_cast<Eigen::Index>(n_and_value.size());
  Eigen::ArrayXd xs(m), ys(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& [n, v] = n_and_value[i];
    if (!(n > 0.0) || !(v > 0.0))
      throw std::invalid_argument("rate_fit: values must be positive");
    xs[i] = std::log(n);
    ys[i] = std::log(v);
  }
  const double xm = xs.mean(), ym = ys.mean();
  const double sxx = (xs - xm).square().sum();
  const double sxy = ((xs - xm) * (ys - ym)).sum();
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  const double ss_res = (ys - (fit.intercept + fit.slope * xs)).square().sum();
  const double ss_tot = (ys - ym).square().sum();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.theoretical_exponent = theoretical_exponent;
  fit.abs_slope_gap = std::abs(fit.slope - theoretical_exponent);
  return fit;
}

ContractionLab::ContractionLab(ExperimentConfig cfg, int threads)
    : cfg_(std::move(cfg)), threads_(std::max(1, threads)) {
  cfg_.validate();
  const int lm = cfg_.effective_l_max();
  f0_ = materialize(cfg_.truth, lm);
  gamma_.resize(lm);
  weight_.resize(lm);
  const double gexp = 0.5 + cfg_.beta / cfg_.d;
  const double wexp = 2.0 * cfg_.s / cfg_.d;
  for (int l = 1; l <= lm; ++l) {
    gamma_[l - 1] = std::pow(static_cast<double>(l), gexp);
    weight_[l - 1] = std::pow(static_cast<double>(l), wexp);
  }
}

double ContractionLab::det_term(std::int64_t n, int l) const {
  const MarginalPosterior p(n, gamma_[l - 1], f0_.at(l));
  return weight_[l - 1] * second_moment_about(p, f0_.at(l));
}

double ContractionLab::det_tail_bound_from(int l_from) const {
  // For l with gamma_l^2 >= 2n the posterior term obeys
  //   W2^2(pi(.|f0_l), delta_{f0_l}) <= c / gamma_l^2,
  // with c = 4 e^{T} / (e^{-T^2/2} sqrt(2 pi) erfcx(1/sqrt(2))) and
  // T = sup_{l >= l_from} |gamma_l f0_l|: the numerator drops the Gaussian
  // factor, the denominator keeps it with e^{-q t^2} >= e^{-t^2/4} for
  // q <= 1/4. Summing c l^{2s/d} / gamma_l^2 <= c l^{-1-a}, a = 2(beta-s)/d.
  const double T = rescaled_sup_from(cfg_.truth, l_from);
  const double c_det = 4.0 * std::exp(T + 0.5 * T * T) /
                       (std::sqrt(2.0 * M_PI) * specfun::erfcx(specfun::inv_sqrt_two));
  const double a = 2.0 * (cfg_.beta - cfg_.s) / cfg_.d;
  return c_det * std::pow(static_cast<double>(l_from) - 1.0, -a) / a;
}

double ContractionLab::stoch_tail_bound_from(std::int64_t n, int l_from) const {
  // Lipschitz bound for l > L_n: W2 <= 8 n / gamma_l^2 |x - y| with
  // E|X_l - f0_l|^2 = 1/n, so the term is at most 64 n l^{2s/d} gamma_l^{-4}.
  const double c = 2.0 + (4.0 * cfg_.beta - 2.0 * cfg_.s) / cfg_.d;
  return 64.0 * static_cast<double>(n) *
         std::pow(static_cast<double>(l_from) - 1.0, 1.0 - c) / (c - 1.0);
}

TailReport ContractionLab::tail_check(std::int64_t n) const {
  const int lm = l_max();
  const auto th = thresholds(n, cfg_.beta, cfg_.d, default_M_n(n));
  TailReport rep{};
  auto blocks = parallel_map_blocks(lm, 8192, threads_, [&](std::size_t lo, std::size_t hi) {
    return pairwise_sum_generate(hi - lo,
                                 [&](std::size_t i) { return det_term(n, static_cast<int>(lo + i) + 1); });
  });
  rep.retained = pairwise_sum(blocks);
  if (lm <= th.L_n) {
    // The high-frequency bound does not cover l <= L_n; the truncation is
    // certainly inadequate.
    rep.tail_bound = std::numeric_limits<double>::infinity();
    rep.pass = false;
    rep.suggested_l_max = 4 * th.L_n;
    return rep;
  }
  rep.tail_bound = det_tail_bound_from(lm + 1);
  rep.pass = rep.tail_bound <= cfg_.tail_tolerance * rep.retained;
  const double a = 2.0 * (cfg_.beta - cfg_.s) / cfg_.d;
  const double T = rescaled_sup_from(cfg_.truth, lm + 1);
  const double c_det = 4.0 * std::exp(T + 0.5 * T * T) /
                       (std::sqrt(2.0 * M_PI) * specfun::erfcx(specfun::inv_sqrt_two));
  const double needed = std::pow(c_det / (a * cfg_.tail_tolerance * rep.retained), 1.0 / a);
  rep.suggested_l_max = static_cast<int>(std::ceil(std::max(needed, 4.0 * th.L_n)));
  return rep;
}

CoefSeq ContractionLab::observation(std::int64_t n, int tag, int replicate) const {
  const auto key = derive_key({static_cast<std::uint64_t>(cfg_.seed),
                               static_cast<std::uint64_t>(tag), static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(replicate)});
  return sample_observation(f0_, NoiseModel(n), static_cast<std::int64_t>(key));
}

double ContractionLab::epsilon_sq_one(std::int64_t n, const CoefSeq& x_obs) const {
  if (x_obs.l_max() != l_max())
    throw std::invalid_argument("epsilon_sq_one: observation length mismatch");
  auto blocks = parallel_map_blocks(l_max(), 8192, 1, [&](std::size_t lo, std::size_t hi) {
    return pairwise_sum_generate(hi - lo, [&](std::size_t i) {
      const int l = static_cast<int>(lo + i) + 1;
      const MarginalPosterior p(n, gamma_[l - 1], x_obs.at(l));
      return weight_[l - 1] * second_moment_about(p, f0_.at(l));
    });
  });
  return pairwise_sum(blocks);
}

namespace {

McEstimate summarize(const std::vector<double>& vals) {
  const int r = static_cast<int>(vals.size());
  const double mean = pairwise_sum(vals) / r;
  double se = 0.0;
  if (r > 1) {
    std::vector<double> dev(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) dev[i] = (vals[i] - mean) * (vals[i] - mean);
    se = std::sqrt(pairwise_sum(dev) / (static_cast<double>(r) * (r - 1)));
  }
  return McEstimate{mean, se, r};
}

}  // namespace

McEstimate ContractionLab::epsilon_n(std::int64_t n) const {
  const auto tail = tail_check(n);
  if (!tail.pass)
    throw TailCheckError("epsilon_n: truncation tail above tolerance; increase l_max to ~" +
                             std::to_string(tail.suggested_l_max),
                         tail.suggested_l_max);
  auto vals = parallel_map(cfg_.replicates, threads_, [&](std::size_t r) {
    return std::sqrt(epsilon_sq_one(n, observation(n, kTagEpsilon, static_cast<int>(r))));
  });
  return summarize(vals);
}

double ContractionLab::deterministic_series(std::int64_t n) const {
  const auto tail = tail_check(n);
  if (!tail.pass)
    throw TailCheckError("deterministic_series: truncation tail above tolerance; increase l_max to ~" +
                             std::to_string(tail.suggested_l_max),
                         tail.suggested_l_max);
  return tail.retained;
}

int ContractionLab::stochastic_cutoff(std::int64_t n) const {
  const auto th = thresholds(n, cfg_.beta, cfg_.d, default_M_n(n));
  return std::min<int>(l_max(), std::max(256, 16 * th.L_n));
}

double ContractionLab::stochastic_series_one(std::int64_t n, const CoefSeq& x_obs) const {
  if (x_obs.l_max() != l_max())
    throw std::invalid_argument("stochastic_series_one: observation length mismatch");
  const int l_cut = stochastic_cutoff(n);
  auto blocks = parallel_map_blocks(l_cut, 2048, 1, [&](std::size_t lo, std::size_t hi) {
    return pairwise_sum_generate(hi - lo, [&](std::size_t i) {
      const int l = static_cast<int>(lo + i) + 1;
      const double g = gamma_[l - 1];
      const double w2 =
          w2_posterior_pair(MarginalPosterior(n, g, x_obs.at(l)), MarginalPosterior(n, g, f0_.at(l)));
      return weight_[l - 1] * w2 * w2;
    });
  });
  return pairwise_sum(blocks);
}

McEstimate ContractionLab::stochastic_series(std::int64_t n, int replicates_override) const {
  const auto tail = tail_check(n);
  if (!tail.pass)
    throw TailCheckError("stochastic_series: truncation tail above tolerance; increase l_max to ~" +
                             std::to_string(tail.suggested_l_max),
                         tail.suggested_l_max);
  const int reps = replicates_override > 0 ? replicates_override : cfg_.replicates;
  auto vals = parallel_map(reps, threads_, [&](std::size_t r) {
    return stochastic_series_one(n, observation(n, kTagStochastic, static_cast<int>(r)));
  });
  return summarize(vals);
}

McEstimate ContractionLab::contraction_probability(std::int64_t n, double xi) const {
  if (!(xi >= 0.0)) throw std::invalid_argument("contraction_probability: xi must be >= 0");
  const auto tail = tail_check(n);
  if (!tail.pass)
    throw TailCheckError("contraction_probability: truncation tail above tolerance; increase l_max to ~" +
                             std::to_string(tail.suggested_l_max),
                         tail.suggested_l_max);
  const int lm = l_max();
  const double xi_sq = xi * xi;
  auto vals = parallel_map(cfg_.replicates, threads_, [&](std::size_t r) {
    const CoefSeq x_obs = observation(n, kTagContraction, static_cast<int>(r));
    std::vector<detail::MixtureCache> caches;
    caches.reserve(lm);
    std::vector<CounterRng> streams;
    streams.reserve(lm);
    for (int l = 1; l <= lm; ++l) {
      caches.emplace_back(MarginalPosterior(n, gamma_[l - 1], x_obs.at(l)));
      streams.emplace_back(derive_key({static_cast<std::uint64_t>(cfg_.seed), 404u,
                                       static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r),
                                       static_cast<std::uint64_t>(l)}));
    }
    int exceed = 0;
    std::vector<double> terms(lm);
    for (int j = 0; j < cfg_.mc_draws; ++j) {
      for (int l = 1; l <= lm; ++l) {
        const double theta = detail::sample_cached(caches[l - 1], streams[l - 1]);
        const double diff = theta - f0_.at(l);
        terms[l - 1] = weight_[l - 1] * diff * diff;
      }
      if (pairwise_sum(terms) > xi_sq) ++exceed;
    }
    return static_cast<double>(exceed) / cfg_.mc_draws;
  });
  return summarize(vals);
}

SeriesReport ContractionLab::decompose(std::int64_t n, bool with_breakdown,
                                       int stoch_replicates) const {
  SeriesReport rep;
  rep.n = n;
  const auto th = thresholds(n, cfg_.beta, cfg_.d, default_M_n(n));
  rep.J_n = th.J_n;
  rep.L_n = th.L_n;

  const auto tail = tail_check(n);
  if (!tail.pass)
    throw TailCheckError("decompose: truncation tail above tolerance; increase l_max to ~" +
                             std::to_string(tail.suggested_l_max),
                         tail.suggested_l_max);
  rep.deterministic = tail.retained;
  rep.det_tail_bound = tail.tail_bound;

  const auto stoch = stochastic_series(n, stoch_replicates);
  rep.stochastic = stoch.value;
  rep.stochastic_stderr = stoch.std_error;
  rep.stoch_tail_bound = stoch_tail_bound_from(n, stochastic_cutoff(n) + 1);

  const auto eps = epsilon_n(n);
  rep.eps = eps.value;
  rep.eps_stderr = eps.std_error;

  // eps^2 <= 2*stoch + 2*det must hold for the true values; compare the
  // most pessimistic 2-sigma corners of the MC estimates.
  const double lhs = std::max(0.0, rep.eps - 2.0 * rep.eps_stderr);
  const double rhs = 2.0 * (rep.stochastic + 2.0 * rep.stochastic_stderr) +
                     2.0 * (rep.deterministic + rep.det_tail_bound) + rep.stoch_tail_bound;
  rep.inequality_pass = lhs * lhs <= rhs;

  if (with_breakdown) {
    rep.det_terms.reserve(l_max());
    for (int l = 1; l <= l_max(); ++l)
      rep.det_terms.push_back(SeriesTerm{l, weight_[l - 1], det_term(n, l)});
    const int reps = stoch_replicates > 0 ? stoch_replicates : cfg_.replicates;
    const int l_cut = stochastic_cutoff(n);
    std::vector<double> acc(l_cut, 0.0);
    for (int r = 0; r < reps; ++r) {
      const CoefSeq x_obs = observation(n, kTagStochastic, r);
      for (int l = 1; l <= l_cut; ++l) {
        const double g = gamma_[l - 1];
        const double w2 = w2_posterior_pair(MarginalPosterior(n, g, x_obs.at(l)),
                                            MarginalPosterior(n, g, f0_.at(l)));
        acc[l - 1] += weight_[l - 1] * w2 * w2;
      }
    }
    rep.stoch_terms.reserve(l_cut);
    for (int l = 1; l <= l_cut; ++l)
      rep.stoch_terms.push_back(SeriesTerm{l, weight_[l - 1], acc[l - 1] / reps});
  }
  return rep;
}

std::vector<std::pair<double, double>> ContractionLab::epsilon_curve() const {
  std::vector<std::pair<double, double>> curve;
  curve.reserve(cfg_.n_grid.size());
  for (std::int64_t n : cfg_.n_grid)
    curve.emplace_back(static_cast<double>(n), epsilon_n(n).value);
  return curve;
}

RateFit ContractionLab::epsilon_rate_fit() const {
  const double expo = -(cfg_.beta - cfg_.s) / (2.0 * cfg_.beta + cfg_.d);
  const auto curve = epsilon_curve();
  return rate_fit(curve, expo);
}

std::vector<LipCell> lipschitz_ratio_scan(double beta, int d, std::int64_t n,
                                          std::span<const int> l_list,
                                          std::span<const std::pair<double, double>> x_pairs) {
  const auto th = thresholds(n, beta, d, default_M_n(n));
  const double low_bound = 4.0 * std::exp(16.0 * std::sqrt(2.0 / M_PI));
  std::vector<LipCell> cells;
  cells.reserve(l_list.size() * x_pairs.size());
  for (int l : l_list) {
    const PriorScale scale(beta, d, l);
    const bool high = l > th.L_n;
    const double bound =
        high ? 8.0 * static_cast<double>(n) / (scale.gamma * scale.gamma) : low_bound;
    for (const auto& [x, y] : x_pairs) {
      if (x == y) throw std::invalid_argument("lipschitz_ratio_scan: x_pairs must have x != y");
      const MarginalPosterior px(n, scale.gamma, x), py(n, scale.gamma, y);
      const double w2 = w2_univariate([&](double u) { return quantile(px, u); },
                                      [&](double u) { return quantile(py, u); });
      const double ratio = w2 / std::abs(x - y);
      cells.push_back(LipCell{n, l, x, y, high, ratio, bound, ratio <= bound});
    }
  }
  return cells;
}

RateFit derivative_rate_experiment(const ExperimentConfig& cfg, int gamma_order, int threads) {
  if (gamma_order < 0) throw std::invalid_argument("derivative_rate_experiment: |gamma| >= 0");
  if (!(cfg.beta > gamma_order + 0.5 * cfg.d))
    throw std::invalid_argument(
        "derivative_rate_experiment: requires beta > |gamma| + d/2");
  ExperimentConfig cfg2 = cfg;
  cfg2.s = static_cast<double>(gamma_order);
  ContractionLab lab(cfg2, threads);
  return lab.epsilon_rate_fit();
}

}  // namespace besov
