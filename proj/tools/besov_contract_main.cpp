// besov-contract: posterior contraction experiments for Laplace-type priors
// in the Gaussian sequence model.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "besov/commands.hpp"
#include "besov/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Posterior contraction laboratory for Besov-Laplace priors"};
  app.set_version_flag("--version", std::string(besov::kArtifactVersion));
  app.require_subcommand(1);

  besov::CliOptions opts;
  std::string config_path;
  std::int64_t seed = 0;
  std::string out_dir;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads,
                    "worker threads (fallback: BESOV_CONTRACT_THREADS, then hardware)");
    sub->add_option("--out", out_dir, "override the output directory");
  };

  auto* verify = app.add_subcommand("verify", "run the numerical oracle suites");
  auto* rates = app.add_subcommand("rates", "estimate eps_n over the n-grid and fit its slope");
  auto* decompose = app.add_subcommand("decompose",
                                       "stochastic/deterministic series and thresholds per n");
  auto* lipscan = app.add_subcommand("lipscan", "posterior Lipschitz ratios against the bounds");
  for (auto* sub : {verify, rates, decompose, lipscan}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  opts.config_path = config_path;
  if (app.count_all() && verify->count("--seed") + rates->count("--seed") +
                             decompose->count("--seed") + lipscan->count("--seed") >
                         0)
    opts.seed_override = seed;
  if (verify->count("--out") + rates->count("--out") + decompose->count("--out") +
          lipscan->count("--out") >
      0)
    opts.out_override = out_dir;
  opts.threads = threads;

  if (verify->parsed()) return besov::cmd_verify(opts, std::cout);
  if (rates->parsed()) return besov::cmd_rates(opts, std::cout);
  if (decompose->parsed()) return besov::cmd_decompose(opts, std::cout);
  if (lipscan->parsed()) return besov::cmd_lipscan(opts, std::cout);
  return 2;
}
