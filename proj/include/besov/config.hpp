// Declarative experiment configuration: an INI-style file with sections
// [model], [truth], [experiment], [output] (plus the optional [verify]
// fault-injection hook). Numeric fields accept scientific notation.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "besov/contraction.hpp"

namespace besov {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::string output_dir = "out";
  // [verify] hook: additive perturbation applied to log_normalizer inside
  // cmd_verify's normalizer check, for exercising the failure path.
  double verify_perturb_log_normalizer = 0.0;
  std::string raw_text;  // config file bytes, hashed into the manifest
};

/// Parses and validates a config file. Unknown sections or keys are errors.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);

/// 64-bit FNV-1a, used for config/manifest hashes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hash_hex(std::uint64_t h);

struct RunManifest {
  std::string manifest_hash;  // hash of (config bytes, effective seed, version, command)
  std::string config_hash;
  std::string artifact_version;
  std::int64_t seed = 0;
  std::string command;
  std::string timestamp;
  std::vector<std::string> outputs;
};

RunManifest make_manifest(const RunConfig& cfg, const std::string& command);
void write_manifest(const RunManifest& m, const std::filesystem::path& dir);

}  // namespace besov
