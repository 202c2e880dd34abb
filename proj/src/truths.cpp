#include "besov/truths.hpp"

#include <cmath>
#include <stdexcept>

#include "besov/rng.hpp"

namespace besov {

namespace {

void validate(const TruthSpec& spec) {
  if (spec.d < 1) throw std::invalid_argument("TruthSpec: d must be >= 1");
  if (!(spec.beta > 0.5 * spec.d))
    throw std::invalid_argument("TruthSpec: beta must exceed d/2");
  if (!(spec.amplitude > 0.0)) throw std::invalid_argument("TruthSpec: amplitude must be > 0");
  if (spec.kind != TruthKind::SparseSpikes && !(spec.decay_damping > 1.0))
    throw std::invalid_argument("TruthSpec: decay_damping must be > 1");
}

// amplitude * l^{-beta/d - 1/2} (1 + ln l)^{-damping}
double poly_profile(const TruthSpec& spec, int l) {
  const double ld = static_cast<double>(l);
  return spec.amplitude * std::pow(ld, -spec.beta / spec.d - 0.5) *
         std::pow(1.0 + std::log(ld), -spec.decay_damping);
}

}  // namespace

CoefSeq materialize(const TruthSpec& spec, int l_max) {
  validate(spec);
  if (l_max < 1) throw std::invalid_argument("materialize: l_max must be >= 1");
  Eigen::ArrayXd c = Eigen::ArrayXd::Zero(l_max);
  switch (spec.kind) {
    case TruthKind::PolyDecay:
      for (int l = 1; l <= l_max; ++l) c[l - 1] = poly_profile(spec, l);
      break;
    case TruthKind::SparseSpikes:
      for (const auto& [l, v] : spec.spike_positions) {
        if (l < 1 || l > l_max)
          throw std::invalid_argument("materialize: spike index outside 1..l_max");
        c[l - 1] = v;
      }
      break;
    case TruthKind::SelfSimilarRandom: {
      const std::uint64_t key = derive_key({static_cast<std::uint64_t>(spec.seed)});
      for (int l = 1; l <= l_max; ++l) {
        const double sign = (rng_at(key, l) & 1u) ? 1.0 : -1.0;
        c[l - 1] = sign * poly_profile(spec, l);
      }
      break;
    }
  }
  return CoefSeq(spec.d, std::move(c));
}

double rescaled_sup_from(const TruthSpec& spec, int l_from) {
  validate(spec);
  if (l_from < 1) l_from = 1;
  switch (spec.kind) {
    case TruthKind::PolyDecay:
    case TruthKind::SelfSimilarRandom:
      // l^{1/2 + beta/d} * |f_l| = amplitude (1 + ln l)^{-damping}, decreasing.
      return spec.amplitude * std::pow(1.0 + std::log(static_cast<double>(l_from)),
                                       -spec.decay_damping);
    case TruthKind::SparseSpikes: {
      double sup = 0.0;
      for (const auto& [l, v] : spec.spike_positions)
        if (l >= l_from)
          sup = std::max(sup, std::pow(static_cast<double>(l), 0.5 + spec.beta / spec.d) *
                                  std::abs(v));
      return sup;
    }
  }
  return 0.0;
}

}  // namespace besov
