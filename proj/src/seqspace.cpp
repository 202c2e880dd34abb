#include "besov/seqspace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <vector>

#include "besov/rng.hpp"
#include "besov/summation.hpp"

namespace besov {

CoefSeq::CoefSeq(int dim, Eigen::ArrayXd c) : d(dim), coefs(std::move(c)) {
  if (d < 1) throw std::invalid_argument("CoefSeq: d must be >= 1");
  if (coefs.size() < 1) throw std::invalid_argument("CoefSeq: l_max must be >= 1");
  if (!coefs.isFinite().all()) throw std::invalid_argument("CoefSeq: entries must be finite");
}

double besov_norm(const CoefSeq& f, const BesovIndex& idx) {
  const double expo = idx.p * (idx.s / f.d + 0.5) - 1.0;
  const int n = f.l_max();
  std::vector<double> terms(n);
  for (int l = 1; l <= n; ++l)
    terms[l - 1] = std::pow(static_cast<double>(l), expo) * std::pow(std::abs(f.at(l)), idx.p);
  return std::pow(pairwise_sum(terms), 1.0 / idx.p);
}

double sobolev_distance(const CoefSeq& f, const CoefSeq& g, double s) {
  if (f.d != g.d) throw std::invalid_argument("sobolev_distance: dimension mismatch");
  if (!(s >= 0.0)) throw std::invalid_argument("sobolev_distance: s must be >= 0");
  const int n = std::max(f.l_max(), g.l_max());
  const double expo = 2.0 * s / f.d;
  std::vector<double> terms(n);
  for (int l = 1; l <= n; ++l) {
    const double fl = l <= f.l_max() ? f.at(l) : 0.0;
    const double gl = l <= g.l_max() ? g.at(l) : 0.0;
    const double diff = fl - gl;
    terms[l - 1] = std::pow(static_cast<double>(l), expo) * diff * diff;
  }
  return std::sqrt(pairwise_sum(terms));
}

CoefSeq sample_observation(const CoefSeq& f0, const NoiseModel& model, std::int64_t seed) {
  const std::uint64_t key = derive_key({static_cast<std::uint64_t>(seed)});
  const double sigma = 1.0 / std::sqrt(static_cast<double>(model.n));
  Eigen::ArrayXd x(f0.l_max());
  for (int l = 1; l <= f0.l_max(); ++l) x[l - 1] = f0.at(l) + sigma * normal_at(key, l);
  return CoefSeq(f0.d, std::move(x));
}

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(std::string_view sv, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
  if (res.ec != std::errc{} || res.ptr != sv.data() + sv.size())
    throw std::runtime_error(std::string("CoefSeq parse: bad ") + what + " field");
  return v;
}

}  // namespace

void write_csv(const CoefSeq& f, std::ostream& os) {
  os << "l,value\n";
  for (int l = 1; l <= f.l_max(); ++l) os << l << ',' << format_double(f.at(l)) << '\n';
}

CoefSeq read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "l,value")
    throw std::runtime_error("CoefSeq CSV: missing 'l,value' header");
  std::vector<double> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("CoefSeq CSV: malformed row");
    const int l = static_cast<int>(parse_double(std::string_view(line).substr(0, comma), "index"));
    if (l != static_cast<int>(vals.size()) + 1)
      throw std::runtime_error("CoefSeq CSV: indices must be 1..l_max in order");
    vals.push_back(parse_double(std::string_view(line).substr(comma + 1), "value"));
  }
  Eigen::ArrayXd c = Eigen::Map<const Eigen::ArrayXd>(vals.data(), vals.size());
  return CoefSeq(1, std::move(c));  // CSV carries no dimension; defaults to d=1
}

void write_json(const CoefSeq& f, std::ostream& os) {
  // Emit numbers as raw shortest-round-trip literals to keep the round trip
  // bit-exact (nlohmann would reformat through double -> text itself, which
  // is also exact, but we keep one canonical formatter).
  os << "{\"d\": " << f.d << ", \"coefs\": [";
  for (int l = 1; l <= f.l_max(); ++l) {
    if (l > 1) os << ", ";
    os << format_double(f.at(l));
  }
  os << "]}";
}

CoefSeq read_json(std::istream& is) {
  nlohmann::json j;
  is >> j;
  if (!j.contains("d") || !j.contains("coefs"))
    throw std::runtime_error("CoefSeq JSON: expected keys 'd' and 'coefs'");
  const auto& arr = j["coefs"];
  Eigen::ArrayXd c(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) c[i] = arr[i].get<double>();
  return CoefSeq(j["d"].get<int>(), std::move(c));
}

}  // namespace besov
