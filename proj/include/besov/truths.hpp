// Ground-truth coefficient sequences with summable weighted-l1 norm, i.e.
// sum_l l^{beta/d - 1/2} |f_l| < inf. Three families: polynomially decaying
// coefficients with logarithmic damping, finitely many spikes, and the
// polynomial profile with random signs.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "besov/seqspace.hpp"

namespace besov {

enum class TruthKind { PolyDecay, SparseSpikes, SelfSimilarRandom };

struct TruthSpec {
  TruthKind kind = TruthKind::PolyDecay;
  double beta = 1.0;
  int d = 1;
  double amplitude = 1.0;
  std::vector<std::pair<int, double>> spike_positions;  // SparseSpikes only
  double decay_damping = 2.0;                           // log-power, must be > 1
  std::int64_t seed = 0;                                // SelfSimilarRandom only
};

/// Materializes the first l_max coefficients. Throws std::invalid_argument
/// when beta <= d/2, when the damping is <= 1 (the weighted-l1 norm would
/// diverge), or when a spike index exceeds l_max.
CoefSeq materialize(const TruthSpec& spec, int l_max);

/// sup over l >= l_from of |l^{1/2 + beta/d} f_{0,l}|, evaluated analytically
/// from the generating formula (not from a materialized truncation). Feeds
/// the high-frequency tail bounds.
double rescaled_sup_from(const TruthSpec& spec, int l_from);

}  // namespace besov
