#include <doctest.h>

#include <cmath>

#include "besov/truths.hpp"

using namespace besov;

namespace {

TruthSpec poly(double beta, int d, double amplitude = 1.0, double damping = 2.0) {
  TruthSpec s;
  s.kind = TruthKind::PolyDecay;
  s.beta = beta;
  s.d = d;
  s.amplitude = amplitude;
  s.decay_damping = damping;
  return s;
}

}  // namespace

TEST_CASE("sparse spikes materialize exactly and live in every Besov space") {
  TruthSpec s;
  s.kind = TruthKind::SparseSpikes;
  s.beta = 2.0;
  s.d = 1;
  s.spike_positions = {{1, 3.0}};
  const CoefSeq f0 = materialize(s, 10);
  CHECK(f0.at(1) == 3.0);
  for (int l = 2; l <= 10; ++l) CHECK(f0.at(l) == 0.0);
  for (double beta : {0.6, 1.0, 4.0})
    CHECK(besov_norm(f0, BesovIndex(beta, 1.0)) == doctest::Approx(3.0).epsilon(1e-14));
  s.spike_positions = {{11, 1.0}};
  CHECK_THROWS_AS(materialize(s, 10), std::invalid_argument);
}

TEST_CASE("poly decay formula value") {
  // d=1, beta=1, amplitude=1: f_{0,4} = 4^{-3/2} (1+ln 4)^{-2}
  const CoefSeq f0 = materialize(poly(1.0, 1), 8);
  const double expected = std::pow(4.0, -1.5) * std::pow(1.0 + std::log(4.0), -2.0);
  CHECK(f0.at(4) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("poly decay partial weighted-l1 norms flatten (Cauchy)") {
  const auto spec = poly(1.0, 1);
  const BesovIndex idx(1.0, 1.0);
  const double n3 = besov_norm(materialize(spec, 1000), idx);
  const double n4 = besov_norm(materialize(spec, 10000), idx);
  const double n5 = besov_norm(materialize(spec, 100000), idx);
  CHECK(n4 > n3);
  CHECK(n5 > n4);
  CHECK((n5 - n4) < 0.5 * (n4 - n3));  // successive increments shrink fast
}

TEST_CASE("weighted-l1 norm stable under doubling l_max") {
  for (auto kind : {TruthKind::PolyDecay, TruthKind::SelfSimilarRandom}) {
    TruthSpec s = poly(1.5, 2);
    s.kind = kind;
    s.seed = 7;
    const BesovIndex idx(1.5, 1.0);
    const double a = besov_norm(materialize(s, 20000), idx);
    const double b = besov_norm(materialize(s, 40000), idx);
    CHECK(std::abs(b - a) <= 0.02 * a);
  }
}

TEST_CASE("rescaled coefficients are bounded and vanish") {
  const auto spec = poly(1.0, 1);
  const CoefSeq f0 = materialize(spec, 100000);
  double sup_head = 0.0;
  for (int l = 1; l <= f0.l_max(); ++l) {
    const double t0 = std::pow(static_cast<double>(l), 1.5) * f0.at(l);
    sup_head = std::max(sup_head, std::abs(t0));
  }
  CHECK(sup_head <= spec.amplitude + 1e-12);
  // the analytic tail sup agrees and decays to zero
  CHECK(rescaled_sup_from(spec, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rescaled_sup_from(spec, 100000) < 0.01);
  CHECK(rescaled_sup_from(spec, 100) < rescaled_sup_from(spec, 10));
}

TEST_CASE("self-similar signs are deterministic in the seed") {
  TruthSpec s = poly(1.0, 1);
  s.kind = TruthKind::SelfSimilarRandom;
  s.seed = 12345;
  const CoefSeq a = materialize(s, 50);
  const CoefSeq b = materialize(s, 50);
  bool saw_negative = false, saw_positive = false;
  for (int l = 1; l <= 50; ++l) {
    CHECK(a.at(l) == b.at(l));
    saw_negative = saw_negative || a.at(l) < 0.0;
    saw_positive = saw_positive || a.at(l) > 0.0;
  }
  CHECK(saw_negative);
  CHECK(saw_positive);
}

TEST_CASE("membership preconditions are enforced") {
  CHECK_THROWS_AS(materialize(poly(0.5, 1), 10), std::invalid_argument);   // beta = d/2
  CHECK_THROWS_AS(materialize(poly(1.0, 1, 1.0, 1.0), 10), std::invalid_argument);  // damping
  CHECK_THROWS_AS(materialize(poly(1.0, 1), 0), std::invalid_argument);
}
