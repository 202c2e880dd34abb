// Contraction-rate experiment engine. For a configured (beta, d, s), truth,
// and n-grid it estimates the expected posterior-to-truth Wasserstein
// distance eps_n, the stochastic and deterministic series of its triangle
// decomposition, the frequency thresholds J_n and L_n, posterior-to-posterior
// Lipschitz ratios, and log-log rate fits against theoretical exponents.
//
// Reproducibility contract: with a fixed seed every quantity below is
// bitwise identical under any worker count. Replicates and coefficient
// blocks are fixed work units whose partial sums combine in index order.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "besov/laplace_posterior.hpp"
#include "besov/seqspace.hpp"
#include "besov/truths.hpp"

namespace besov {

struct ExperimentConfig {
  double beta = 1.0;
  int d = 1;
  double s = 0.0;
  TruthSpec truth;
  std::vector<std::int64_t> n_grid;
  int replicates = 100;
  int l_max = 0;  // 0 selects the default ceil(8 * n_max^{d/(2 beta + d)})
  int mc_draws = 100;
  std::int64_t seed = 0;
  double tail_tolerance = 0.01;

  /// Throws std::invalid_argument on violated invariants (s outside
  /// [0, beta - d/2), short or non-increasing n_grid, ...).
  void validate() const;
  int effective_l_max() const;
};

struct Thresholds {
  int J_n;
  int L_n;
};

/// L_n = min{L : L^{(2 beta + d)/d} >= 2n}; J_n = round((n / M_n)^{d/(2 beta + d)}),
/// at least 1.
Thresholds thresholds(std::int64_t n, double beta, int d, double M_n);

/// The slowly diverging factor used for J_n: max(1, log n).
double default_M_n(std::int64_t n);

struct McEstimate {
  double value;
  double std_error;
  int replicates;
};

struct RateFit {
  double slope;
  double intercept;
  double r_squared;
  double theoretical_exponent;
  double abs_slope_gap;
};

/// Least-squares fit of log v against log n. Throws on fewer than 4 points or
/// non-positive values.
RateFit rate_fit(std::span<const std::pair<double, double>> n_and_value,
                 double theoretical_exponent);

struct TailReport {
  double retained;      // deterministic series over l <= l_max
  double tail_bound;    // closed-form bound on the discarded l > l_max part
  bool pass;            // tail_bound <= tail_tolerance * retained
  int suggested_l_max;  // smallest l_max the bound certifies
};

class TailCheckError : public std::runtime_error {
 public:
  TailCheckError(const std::string& msg, int suggested)
      : std::runtime_error(msg), suggested_l_max(suggested) {}
  int suggested_l_max;
};

struct SeriesTerm {
  int l;
  double weight;
  double term;
};

struct SeriesReport {
  std::int64_t n = 0;
  int J_n = 0;
  int L_n = 0;
  double stochastic = 0.0;
  double stochastic_stderr = 0.0;
  double deterministic = 0.0;
  double det_tail_bound = 0.0;
  double stoch_tail_bound = 0.0;
  double eps = 0.0;
  double eps_stderr = 0.0;
  bool inequality_pass = false;  // eps^2 <= 2*stoch + 2*det within MC bands
  std::vector<SeriesTerm> det_terms;    // filled on request
  std::vector<SeriesTerm> stoch_terms;  // MC averages, filled on request
};

struct LipCell {
  std::int64_t n;
  int l;
  double x;
  double y;
  bool high_frequency;  // l > L_n
  double ratio;         // W2(pi(.|x), pi(.|y)) / |x - y|
  double bound;         // 4 e^{16 sqrt(2/pi)} or 8 n / gamma_l^2
  bool pass;
};

class ContractionLab {
 public:
  explicit ContractionLab(ExperimentConfig cfg, int threads = 1);

  const ExperimentConfig& config() const { return cfg_; }
  const CoefSeq& truth() const { return f0_; }
  int l_max() const { return f0_.l_max(); }
  double gamma(int l) const { return gamma_[l - 1]; }
  double weight(int l) const { return weight_[l - 1]; }

  TailReport tail_check(std::int64_t n) const;

  /// E[W2(posterior, delta_truth)] over noise replicates; the inner value per
  /// replicate uses exact mixture moments, so the only randomness is the
  /// observation noise. Throws TailCheckError when l_max is inadequate.
  McEstimate epsilon_n(std::int64_t n) const;

  /// The noise-free series sum_l l^{2s/d} W2^2(pi(.|f0_l), delta_{f0_l});
  /// exact up to truncation, no Monte Carlo.
  double deterministic_series(std::int64_t n) const;

  /// MC estimate of sum_l l^{2s/d} E[W2^2(pi(.|X_l), pi(.|f0_l))]. Terms are
  /// quantile-coupling distances up to the frequency where the Lipschitz
  /// bound certifies the remainder (reported in SeriesReport.stoch_tail_bound).
  McEstimate stochastic_series(std::int64_t n, int replicates_override = 0) const;

  /// Fraction of joint posterior draws with H^s distance to the truth above
  /// xi, averaged over noise replicates.
  McEstimate contraction_probability(std::int64_t n, double xi) const;

  SeriesReport decompose(std::int64_t n, bool with_breakdown = false,
                         int stoch_replicates = 0) const;

  // Per-replicate values with an injected observation; tests use these to
  // force X = f0 and to cross-check the MC wrappers.
  double epsilon_sq_one(std::int64_t n, const CoefSeq& x_obs) const;
  double stochastic_series_one(std::int64_t n, const CoefSeq& x_obs) const;

  /// Observation used for replicate r of quantity `tag` at noise level n.
  CoefSeq observation(std::int64_t n, int tag, int replicate) const;

  /// eps_n over the whole grid fitted against -(beta - s)/(2 beta + d).
  RateFit epsilon_rate_fit() const;
  std::vector<std::pair<double, double>> epsilon_curve() const;

  int stochastic_cutoff(std::int64_t n) const;

 private:
  ExperimentConfig cfg_;
  int threads_;
  CoefSeq f0_;
  Eigen::ArrayXd gamma_;   // l^{1/2 + beta/d}
  Eigen::ArrayXd weight_;  // l^{2s/d}

  double det_term(std::int64_t n, int l) const;
  double stoch_tail_bound_from(std::int64_t n, int l_from) const;
  double det_tail_bound_from(int l_from) const;
};

/// Measured W2 Lipschitz ratios against the regime bounds.
std::vector<LipCell> lipschitz_ratio_scan(double beta, int d, std::int64_t n,
                                          std::span<const int> l_list,
                                          std::span<const std::pair<double, double>> x_pairs);

/// Plug-in derivative experiment: H^{|gamma|} contraction with s = |gamma|,
/// fitted against -(beta - |gamma|)/(2 beta + d). Requires
/// beta > |gamma| + d/2.
RateFit derivative_rate_experiment(const ExperimentConfig& cfg, int gamma_order,
                                   int threads = 1);

inline constexpr int kTagEpsilon = 101;
inline constexpr int kTagStochastic = 202;
inline constexpr int kTagContraction = 303;

}  // namespace besov
