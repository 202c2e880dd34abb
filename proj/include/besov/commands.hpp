// Subcommand implementations behind the CLI. Each returns the process exit
// code: 0 success, 1 check failure, 2 config error, 3 resource/truncation
// error. All user-visible outputs are deterministic for a fixed seed,
// independent of the worker count.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace besov {

struct CliOptions {
  std::filesystem::path config_path;
  std::optional<std::int64_t> seed_override;
  std::optional<std::string> out_override;
  int threads = 0;  // 0: BESOV_CONTRACT_THREADS env var, else hardware concurrency
};

int cmd_verify(const CliOptions& opts, std::ostream& log);
int cmd_rates(const CliOptions& opts, std::ostream& log);
int cmd_decompose(const CliOptions& opts, std::ostream& log);
int cmd_lipscan(const CliOptions& opts, std::ostream& log);

int resolve_threads(int cli_threads);

}  // namespace besov
