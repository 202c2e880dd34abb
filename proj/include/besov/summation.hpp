// Pairwise (tree) summation. Long series of decaying terms lose digits under
// left-to-right accumulation; the tree order bounds the error by O(log N) ulps
// and, being a fixed order, keeps reductions bitwise reproducible.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace besov {

inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
  return pairwise_sum(std::span<const double>(xs));
}

/// Accumulates values generated in index order f(i) for i in [0, n) and
/// pairwise-sums them. Helper for series whose terms are produced on the fly.
template <class F>
double pairwise_sum_generate(std::size_t n, F&& f) {
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = f(i);
  return pairwise_sum(buf);
}

}  // namespace besov
