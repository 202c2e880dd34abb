// Sequence-space representation of functions on the unit cube. A function is
// identified with its coefficient sequence in a fixed orthonormal basis,
// single-indexed by l >= 1; all norms below are weighted lp norms of that
// sequence, truncated at l_max.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace besov {

/// Finite truncation of a coefficient sequence, entries indexed l = 1..l_max.
struct CoefSeq {
  int d = 1;              // ambient dimension of the underlying domain
  Eigen::ArrayXd coefs;   // coefs[l-1] is the l-th coefficient

  CoefSeq() = default;
  CoefSeq(int dim, Eigen::ArrayXd c);

  int l_max() const { return static_cast<int>(coefs.size()); }
  double at(int l) const { return coefs[l - 1]; }
};

/// Smoothness/integrability pair (s, p); p = 2 gives the Sobolev scale.
struct BesovIndex {
  double s = 0.0;
  double p = 2.0;

  BesovIndex(double s_, double p_) : s(s_), p(p_) {
    if (!(s >= 0.0)) throw std::invalid_argument("BesovIndex: s must be >= 0");
    if (!(p >= 1.0)) throw std::invalid_argument("BesovIndex: p must be >= 1");
  }
};

/// Observation noise level: coefficients are observed with iid N(0, 1/n)
/// errors.
struct NoiseModel {
  std::int64_t n = 1;

  explicit NoiseModel(std::int64_t n_) : n(n_) {
    if (n < 1) throw std::invalid_argument("NoiseModel: n must be >= 1");
  }
};

/// (sum_l l^{p(s/d + 1/2) - 1} |f_l|^p)^{1/p}, truncated at l_max.
double besov_norm(const CoefSeq& f, const BesovIndex& idx);

/// (sum_l l^{2s/d} |f_l - g_l|^2)^{1/2}; the shorter sequence is zero-padded.
/// Throws on dimension mismatch.
double sobolev_distance(const CoefSeq& f, const CoefSeq& g, double s);

/// X_l = f0_l + n^{-1/2} Z_l with Z_l standard normal drawn from the
/// counter-based stream keyed by (seed, l); bitwise deterministic.
CoefSeq sample_observation(const CoefSeq& f0, const NoiseModel& model, std::int64_t seed);

// Serialization. CSV has header "l,value"; JSON is {"d": ..., "coefs": [...]}.
// Doubles are written in shortest round-trip decimal form, so read(write(x))
// is bit-exact.
void write_csv(const CoefSeq& f, std::ostream& os);
CoefSeq read_csv(std::istream& is);
void write_json(const CoefSeq& f, std::ostream& os);
CoefSeq read_json(std::istream& is);

/// Shortest decimal representation that round-trips a binary64 value.
std::string format_double(double x);

}  // namespace besov
