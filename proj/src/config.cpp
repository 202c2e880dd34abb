#include "besov/config.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <vector>

#include "besov/version.hpp"

namespace besov {

namespace {

std::string trim(std::string_view sv) {
  const auto b = sv.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = sv.find_last_not_of(" \t\r");
  return std::string(sv.substr(b, e - b + 1));
}

using Section = std::map<std::string, std::string, std::less<>>;

std::map<std::string, Section, std::less<>> parse_ini(const std::string& text) {
  std::map<std::string, Section, std::less<>> out;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      out[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (!out[section].emplace(key, val).second)
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: field '" + key + "' is not a number: '" + v + "'");
  }
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  const double d = to_double(v, key);
  const auto i = static_cast<std::int64_t>(std::llround(d));
  if (std::abs(d - static_cast<double>(i)) > 1e-9 * std::max(1.0, std::abs(d)))
    throw ConfigError("config: field '" + key + "' must be an integer: '" + v + "'");
  return i;
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, sep)) {
    const std::string t = trim(cur);
    if (!t.empty()) parts.push_back(t);
  }
  return parts;
}

class SectionReader {
 public:
  SectionReader(const Section* sec, std::string name) : sec_(sec), name_(std::move(name)) {}

  std::optional<std::string> get(const std::string& key) {
    if (!sec_) return std::nullopt;
    seen_.insert(key);
    const auto it = sec_->find(key);
    if (it == sec_->end()) return std::nullopt;
    return it->second;
  }
  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("config: [" + name_ + "] is missing required key '" + key + "'");
    return *v;
  }
  void check_no_unknown() const {
    if (!sec_) return;
    for (const auto& [k, v] : *sec_)
      if (!seen_.contains(k))
        throw ConfigError("config: unknown key '" + k + "' in section [" + name_ + "]");
  }

 private:
  const Section* sec_;
  std::string name_;
  std::set<std::string> seen_;
};

TruthKind parse_kind(const std::string& v) {
  if (v == "poly_decay") return TruthKind::PolyDecay;
  if (v == "sparse_spikes") return TruthKind::SparseSpikes;
  if (v == "self_similar") return TruthKind::SelfSimilarRandom;
  throw ConfigError("config: unknown truth kind '" + v +
                    "' (expected poly_decay | sparse_spikes | self_similar)");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const auto ini = parse_ini(text);
  for (const auto& [name, sec] : ini)
    if (name != "model" && name != "truth" && name != "experiment" && name != "output" &&
        name != "verify")
      throw ConfigError("config: unknown section [" + name + "]");

  auto section = [&](const char* n) -> const Section* {
    const auto it = ini.find(n);
    return it == ini.end() ? nullptr : &it->second;
  };

  RunConfig rc;
  rc.raw_text = text;
  ExperimentConfig& ec = rc.experiment;

  SectionReader model(section("model"), "model");
  ec.beta = to_double(model.require("beta"), "beta");
  ec.d = static_cast<int>(to_int(model.require("d"), "d"));
  if (auto v = model.get("s")) ec.s = to_double(*v, "s");
  model.check_no_unknown();

  SectionReader truth(section("truth"), "truth");
  ec.truth.kind = parse_kind(truth.require("kind"));
  ec.truth.beta = ec.beta;
  ec.truth.d = ec.d;
  if (auto v = truth.get("amplitude")) ec.truth.amplitude = to_double(*v, "amplitude");
  if (auto v = truth.get("decay_damping")) ec.truth.decay_damping = to_double(*v, "decay_damping");
  if (auto v = truth.get("seed")) ec.truth.seed = to_int(*v, "truth.seed");
  if (auto v = truth.get("spikes")) {
    for (const auto& item : split(*v, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw ConfigError("config: spikes must be 'index:value' pairs, got '" + item + "'");
      ec.truth.spike_positions.emplace_back(
          static_cast<int>(to_int(trim(std::string_view(item).substr(0, colon)), "spike index")),
          to_double(trim(std::string_view(item).substr(colon + 1)), "spike value"));
    }
  }
  truth.check_no_unknown();

  SectionReader exp(section("experiment"), "experiment");
  for (const auto& part : split(exp.require("n_grid"), ','))
    ec.n_grid.push_back(to_int(part, "n_grid"));
  if (auto v = exp.get("replicates")) ec.replicates = static_cast<int>(to_int(*v, "replicates"));
  if (auto v = exp.get("l_max")) ec.l_max = static_cast<int>(to_int(*v, "l_max"));
  if (auto v = exp.get("mc_draws")) ec.mc_draws = static_cast<int>(to_int(*v, "mc_draws"));
  if (auto v = exp.get("seed")) ec.seed = to_int(*v, "seed");
  if (auto v = exp.get("tail_tolerance")) ec.tail_tolerance = to_double(*v, "tail_tolerance");
  exp.check_no_unknown();

  SectionReader output(section("output"), "output");
  if (auto v = output.get("dir")) rc.output_dir = *v;
  output.check_no_unknown();

  SectionReader verify(section("verify"), "verify");
  if (auto v = verify.get("perturb_log_normalizer"))
    rc.verify_perturb_log_normalizer = to_double(*v, "perturb_log_normalizer");
  verify.check_no_unknown();

  try {
    ec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

RunManifest make_manifest(const RunConfig& cfg, const std::string& command) {
  RunManifest m;
  m.config_hash = hash_hex(fnv1a64(cfg.raw_text));
  std::uint64_t h = fnv1a64(cfg.raw_text);
  h = fnv1a64(std::to_string(cfg.experiment.seed), h);
  h = fnv1a64(kArtifactVersion, h);
  h = fnv1a64(command, h);
  m.manifest_hash = hash_hex(h);
  m.artifact_version = kArtifactVersion;
  m.seed = cfg.experiment.seed;
  m.command = command;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  m.timestamp = buf;
  return m;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
  nlohmann::json j{{"manifest_hash", m.manifest_hash},
                   {"config_hash", m.config_hash},
                   {"artifact_version", m.artifact_version},
                   {"seed", m.seed},
                   {"command", m.command},
                   {"timestamp", m.timestamp},
                   {"outputs", m.outputs}};
  std::ofstream os(dir / "manifest.json");
  os << j.dump(2) << '\n';
}

}  // namespace besov
