#include "besov/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "besov/config.hpp"
#include "besov/parallel.hpp"
#include "besov/quadrature.hpp"
#include "besov/seqspace.hpp"
#include "besov/specfun.hpp"
#include "besov/version.hpp"
#include "besov/wasserstein.hpp"

namespace besov {

namespace {

namespace fs = std::filesystem;

struct CheckResult {
  std::string name;
  double max_err;
  double tol;
  bool pass;
};

void csv_preamble(std::ostream& os, const RunManifest& m) {
  os << "# manifest_hash=" << m.manifest_hash << " artifact=" << m.artifact_version << "\n";
}

RunConfig load_with_overrides(const CliOptions& opts) {
  RunConfig rc = load_config(opts.config_path);
  if (opts.seed_override) rc.experiment.seed = *opts.seed_override;
  if (opts.out_override) rc.output_dir = *opts.out_override;
  return rc;
}

std::vector<double> stress_x_values(std::int64_t n, int count) {
  std::vector<double> xs;
  const double lim = 50.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < count; ++i) xs.push_back(-lim + 2.0 * lim * i / (count - 1));
  return xs;
}

// ---- verify checks ------------------------------------------------------

CheckResult check_normalizer(double perturb) {
  CheckResult r{"normalizer_vs_quadrature", 0.0, 1e-9, true};
  for (std::int64_t n : {1LL, 10LL, 1000LL, 1000000LL})
    for (double g : {0.01, 1.0, 1000.0, 1e6})
      for (double x : stress_x_values(n, 7)) {
        const MarginalPosterior p(n, g, x);
        const double lz = log_normalizer(p) + perturb;
        const double oracle = quadrature::quad_posterior_stats(n, g, x).log_Z;
        r.max_err = std::max(r.max_err, std::abs(lz - oracle));
      }
  r.pass = r.max_err <= r.tol;
  return r;
}

// The closed form multiplied back out: sqrt(pi) gamma / sqrt(2n) e^{g^2/2n}
// [e^{-t0} erfc(-sqrt(n/2) x + g/sqrt(2n)) + e^{t0} erfc(sqrt(n/2) x +
// g/sqrt(2n))], t0 = gamma x, valid while e^{g^2/2n} is representable.
CheckResult check_erfc_identity_form() {
  CheckResult r{"normalizer_erfc_identity", 0.0, 1e-9, true};
  for (std::int64_t n : {1LL, 10LL, 1000LL})
    for (double g : {0.01, 1.0, 10.0, 30.0})
      for (double x : {-0.8, -0.1, 0.0, 0.4, 1.3}) {
        const double nn = static_cast<double>(n);
        if (g * g / (2.0 * nn) > 600.0) continue;
        const double t0 = g * x;
        const double lit =
            specfun::sqrt_pi * g / std::sqrt(2.0 * nn) * std::exp(g * g / (2.0 * nn)) *
            (std::exp(-t0) * specfun::erfc(-std::sqrt(nn / 2.0) * x + g / std::sqrt(2.0 * nn)) +
             std::exp(t0) * specfun::erfc(std::sqrt(nn / 2.0) * x + g / std::sqrt(2.0 * nn))) /
            g;
        const double z = std::exp(log_normalizer(MarginalPosterior(n, g, x)));
        r.max_err = std::max(r.max_err, std::abs(z - lit) / lit);
      }
  r.pass = r.max_err <= r.tol;
  return r;
}

CheckResult check_mixture_reconstruction() {
  CheckResult r{"mixture_reconstruction", 0.0, 1e-9, true};
  for (std::int64_t n : {1LL, 100LL, 10000LL})
    for (double g : {0.5, 5.0, 200.0})
      for (double x : {-1.0, 0.0, 0.3}) {
        const MarginalPosterior p(n, g, x);
        const auto mix = mixture(p);
        const double sd = mix.sd;
        for (int k = -6; k <= 6; ++k) {
          const double theta = x + k * sd;
          // density from the mixture decomposition
          const double inv = 1.0 / sd;
          auto branch = [&](double m, double lo_mass) {
            const double z = (theta - m) * inv;
            return std::exp(-0.5 * z * z - lo_mass) * inv * 0.39894228040143267794;
          };
          // at theta = 0 both one-sided branch densities coincide; take one
          const double mix_pdf =
              theta >= 0.0
                  ? mix.w_plus * branch(mix.m_plus, specfun::log_normal_sf(-mix.m_plus * inv))
                  : mix.w_minus() *
                        branch(mix.m_minus, specfun::log_normal_cdf(-mix.m_minus * inv));
          const double direct = std::exp(log_density(p, theta));
          if (direct > 1e-280)
            r.max_err = std::max(r.max_err, std::abs(mix_pdf - direct) / direct);
        }
      }
  r.pass = r.max_err <= r.tol;
  return r;
}

CheckResult check_moments() {
  CheckResult r{"moments_vs_quadrature", 0.0, 1e-8, true};
  for (std::int64_t n : {1LL, 100LL, 100000LL})
    for (double g : {0.1, 3.0, 400.0})
      for (double x : stress_x_values(n, 5)) {
        const MarginalPosterior p(n, g, x);
        const auto q = quadrature::quad_posterior_stats(n, g, x);
        const double scale = std::max(q.variance, 1e-300);
        r.max_err = std::max(r.max_err, std::abs(mean(p) - q.mean) / std::sqrt(scale));
        r.max_err = std::max(r.max_err, std::abs(variance(p) - q.variance) / scale);
        const double c = x * 0.5;
        const double sm = quadrature::quad_second_moment_about(n, g, x, c);
        r.max_err = std::max(r.max_err, std::abs(second_moment_about(p, c) - sm) / sm);
      }
  r.pass = r.max_err <= r.tol;
  return r;
}

CheckResult check_erfc_properties() {
  CheckResult r{"erfc_reflection_and_scaling", 0.0, 1e-12, true};
  for (double z = -5.9; z < 6.0; z += 0.37) {
    r.max_err = std::max(r.max_err, std::abs(specfun::erfc(z) + specfun::erfc(-z) - 2.0) / 2.0);
    const double lhs = specfun::erfcx(z) * std::exp(-z * z);
    r.max_err = std::max(r.max_err, std::abs(lhs - specfun::erfc(z)) / specfun::erfc(z));
  }
  r.pass = r.max_err <= r.tol;
  return r;
}

CheckResult check_wasserstein() {
  CheckResult r{"wasserstein_routes_and_metric", 0.0, 1e-6, true};
  // Gaussian closed form
  for (double mu : {-2.0, 0.0, 1.5}) {
    auto qa = [&](double u) { return mu + 0.7 * specfun::normal_quantile(u); };
    auto qb = [](double u) { return 0.7 * specfun::normal_quantile(u); };
    const double w = w2_univariate(qa, qb);
    r.max_err = std::max(r.max_err, std::abs(w - std::abs(mu)) / std::max(1e-12, std::abs(mu)));
  }
  // dual route against a point mass plus the triangle inequality
  const MarginalPosterior a(100, 4.0, 0.2), b(100, 4.0, 0.1), c(100, 4.0, -0.35);
  auto q = [](const MarginalPosterior& p) {
    return [&p](double u) { return quantile(p, u); };
  };
  const double via_moments = w2_to_dirac(a, 0.1);
  auto dirac = [](double) { return 0.1; };
  const double via_integral = w2_univariate(q(a), dirac);
  r.max_err = std::max(r.max_err, std::abs(via_moments - via_integral) / via_moments);
  const double ab = w2_univariate(q(a), q(b));
  const double bc = w2_univariate(q(b), q(c));
  const double ac = w2_univariate(q(a), q(c));
  if (ac > ab + bc + 1e-10) r.max_err = std::max(r.max_err, ac - (ab + bc));
  const double ba = w2_univariate(q(b), q(a));
  r.max_err = std::max(r.max_err, std::abs(ab - ba) / ab);
  r.pass = r.max_err <= r.tol;
  return r;
}

CheckResult check_quantile_roundtrip() {
  CheckResult r{"quantile_cdf_roundtrip", 0.0, 1e-12, true};
  for (std::int64_t n : {1LL, 1000LL})
    for (double g : {0.3, 60.0})
      for (double x : {-0.6, 0.0, 0.25}) {
        const MarginalPosterior p(n, g, x);
        for (double u : {1e-9, 1e-4, 0.1, 0.5, 0.77, 1.0 - 1e-5, 1.0 - 1e-9})
          r.max_err = std::max(r.max_err, std::abs(cdf(p, quantile(p, u)) - u));
      }
  r.pass = r.max_err <= r.tol;
  return r;
}

}  // namespace

int resolve_threads(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("BESOV_CONTRACT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return default_threads();
}

int cmd_verify(const CliOptions& opts, std::ostream& log) {
  RunConfig rc;
  try {
    rc = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
  RunManifest manifest = make_manifest(rc, "verify");
  const fs::path dir(rc.output_dir);
  fs::create_directories(dir);

  std::vector<CheckResult> checks;
  checks.push_back(check_normalizer(rc.verify_perturb_log_normalizer));
  checks.push_back(check_erfc_identity_form());
  checks.push_back(check_mixture_reconstruction());
  checks.push_back(check_moments());
  checks.push_back(check_erfc_properties());
  checks.push_back(check_wasserstein());
  checks.push_back(check_quantile_roundtrip());

  bool all_pass = true;
  nlohmann::json jchecks = nlohmann::json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    jchecks.push_back({{"name", c.name}, {"max_err", c.max_err}, {"tol", c.tol}, {"pass", c.pass}});
    log << (c.pass ? "  ok   " : "  FAIL ") << std::left << std::setw(32) << c.name
        << " max_err=" << std::scientific << std::setprecision(3) << c.max_err
        << " tol=" << c.tol << std::defaultfloat << '\n';
  }
  nlohmann::json report{{"manifest_hash", manifest.manifest_hash},
                        {"artifact_version", manifest.artifact_version},
                        {"pass", all_pass},
                        {"checks", jchecks}};
  {
    std::ofstream os(dir / "verify_report.json");
    os << report.dump(2) << '\n';
  }
  manifest.outputs = {"verify_report.json"};
  write_manifest(manifest, dir);
  log << (all_pass ? "verify: all checks passed\n" : "verify: CHECK FAILURES\n");
  return all_pass ? 0 : 1;
}

int cmd_rates(const CliOptions& opts, std::ostream& log) {
  RunConfig rc;
  try {
    rc = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
  RunManifest manifest = make_manifest(rc, "rates");
  const fs::path dir(rc.output_dir);
  fs::create_directories(dir);

  try {
    ContractionLab lab(rc.experiment, resolve_threads(opts.threads));
    std::vector<std::pair<double, double>> curve;
    std::ostringstream csv;
    csv_preamble(csv, manifest);
    csv << "n,epsilon,stderr\n";
    log << std::setw(12) << "n" << std::setw(16) << "epsilon" << std::setw(16) << "stderr" << '\n';
    for (std::int64_t n : rc.experiment.n_grid) {
      const auto est = lab.epsilon_n(n);
      curve.emplace_back(static_cast<double>(n), est.value);
      csv << n << ',' << format_double(est.value) << ',' << format_double(est.std_error) << '\n';
      log << std::setw(12) << n << std::setw(16) << std::setprecision(6) << est.value
          << std::setw(16) << est.std_error << '\n';
    }
    const double expo =
        -(rc.experiment.beta - rc.experiment.s) / (2.0 * rc.experiment.beta + rc.experiment.d);
    const RateFit fit = rate_fit(curve, expo);
    {
      std::ofstream os(dir / "rates.csv", std::ios::binary);
      os << csv.str();
    }
    {
      nlohmann::json j{{"manifest_hash", manifest.manifest_hash},
                       {"slope", fit.slope},
                       {"intercept", fit.intercept},
                       {"r_squared", fit.r_squared},
                       {"theoretical_exponent", fit.theoretical_exponent},
                       {"abs_slope_gap", fit.abs_slope_gap}};
      std::ofstream os(dir / "ratefit.json");
      os << j.dump(2) << '\n';
    }
    manifest.outputs = {"rates.csv", "ratefit.json"};
    write_manifest(manifest, dir);
    log << "slope " << std::setprecision(5) << fit.slope << " vs theoretical "
        << fit.theoretical_exponent << " (gap " << fit.abs_slope_gap << ", r^2 " << fit.r_squared
        << ")\n";
    return 0;
  } catch (const TailCheckError& e) {
    log << "truncation error: " << e.what() << '\n';
    return 3;
  }
}

int cmd_decompose(const CliOptions& opts, std::ostream& log) {
  RunConfig rc;
  try {
    rc = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
  RunManifest manifest = make_manifest(rc, "decompose");
  const fs::path dir(rc.output_dir);
  fs::create_directories(dir);

  try {
    ContractionLab lab(rc.experiment, resolve_threads(opts.threads));
    std::ostringstream csv, breakdown;
    csv_preamble(csv, manifest);
    csv << "n,J_n,L_n,stochastic,stochastic_stderr,deterministic,det_tail_bound,"
           "stoch_tail_bound,eps,eps_stderr,inequality\n";
    csv_preamble(breakdown, manifest);
    breakdown << "n,l,weight,det_term,stoch_term\n";
    bool all_pass = true;
    for (std::size_t i = 0; i < rc.experiment.n_grid.size(); ++i) {
      const std::int64_t n = rc.experiment.n_grid[i];
      const bool with_breakdown = i == 0;  // per-l dump for the smallest n
      const auto rep = lab.decompose(n, with_breakdown);
      all_pass = all_pass && rep.inequality_pass;
      csv << n << ',' << rep.J_n << ',' << rep.L_n << ',' << format_double(rep.stochastic) << ','
          << format_double(rep.stochastic_stderr) << ',' << format_double(rep.deterministic)
          << ',' << format_double(rep.det_tail_bound) << ','
          << format_double(rep.stoch_tail_bound) << ',' << format_double(rep.eps) << ','
          << format_double(rep.eps_stderr) << ',' << (rep.inequality_pass ? "pass" : "fail")
          << '\n';
      if (with_breakdown) {
        for (const auto& t : rep.det_terms) {
          breakdown << n << ',' << t.l << ',' << format_double(t.weight) << ','
                    << format_double(t.term) << ',';
          if (t.l <= static_cast<int>(rep.stoch_terms.size()))
            breakdown << format_double(rep.stoch_terms[t.l - 1].term);
          breakdown << '\n';
        }
      }
      log << "n=" << n << " stoch=" << rep.stochastic << " det=" << rep.deterministic
          << " eps=" << rep.eps << " J=" << rep.J_n << " L=" << rep.L_n
          << (rep.inequality_pass ? " [pass]" : " [FAIL]") << '\n';
    }
    {
      std::ofstream os(dir / "series.csv", std::ios::binary);
      os << csv.str();
    }
    {
      std::ofstream os(dir / "series_per_l.csv", std::ios::binary);
      os << breakdown.str();
    }
    manifest.outputs = {"series.csv", "series_per_l.csv"};
    write_manifest(manifest, dir);
    return all_pass ? 0 : 1;
  } catch (const TailCheckError& e) {
    log << "truncation error: " << e.what() << '\n';
    return 3;
  }
}

int cmd_lipscan(const CliOptions& opts, std::ostream& log) {
  RunConfig rc;
  try {
    rc = load_with_overrides(opts);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }
  RunManifest manifest = make_manifest(rc, "lipscan");
  const fs::path dir(rc.output_dir);
  fs::create_directories(dir);

  std::ostringstream csv;
  csv_preamble(csv, manifest);
  csv << "n,l,regime,ratio,bound,pass\n";
  bool all_pass = true;
  for (std::int64_t n : rc.experiment.n_grid) {
    const auto th = thresholds(n, rc.experiment.beta, rc.experiment.d, default_M_n(n));
    std::vector<int> l_list;
    for (double f : {0.1, 0.3, 0.7, 1.0}) {
      const int l = std::max(1, static_cast<int>(std::lround(f * th.L_n)));
      if (l_list.empty() || l != l_list.back()) l_list.push_back(l);
    }
    for (double f : {1.5, 3.0, 8.0}) {
      const int l = static_cast<int>(std::lround(f * th.L_n)) + 1;
      l_list.push_back(l);
    }
    const double delta = 1.0 / std::sqrt(static_cast<double>(n));
    const std::vector<std::pair<double, double>> pairs = {
        {0.0, delta}, {0.5, 0.5 + 0.3 * delta}, {-2.0 * delta, 2.0 * delta}};
    const auto cells = lipschitz_ratio_scan(rc.experiment.beta, rc.experiment.d, n, l_list, pairs);
    for (const auto& c : cells) {
      all_pass = all_pass && c.pass;
      csv << c.n << ',' << c.l << ',' << (c.high_frequency ? "high" : "low") << ','
          << format_double(c.ratio) << ',' << format_double(c.bound) << ','
          << (c.pass ? "pass" : "fail") << '\n';
    }
  }
  {
    std::ofstream os(dir / "lipscan.csv", std::ios::binary);
    os << csv.str();
  }
  manifest.outputs = {"lipscan.csv"};
  write_manifest(manifest, dir);
  log << (all_pass ? "lipscan: all cells within bounds\n" : "lipscan: BOUND VIOLATIONS\n");
  return all_pass ? 0 : 1;
}

}  // namespace besov
