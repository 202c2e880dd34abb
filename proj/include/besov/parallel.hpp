// Deterministic fork-join over fixed index blocks. The block decomposition
// depends only on the problem size, never on the worker count, so reduction
// trees see identical inputs under any threading configuration.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace besov {

inline int default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Evaluates f(i) for i in [0, n) with up to `threads` workers and returns the
/// results in index order. f must be safe to call concurrently.
template <class F>
std::vector<double> parallel_map(std::size_t n, int threads, F&& f) {
  std::vector<double> out(n);
  threads = std::max(1, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      out[i] = f(i);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<std::size_t>(threads, n);
  pool.reserve(nw - 1);
  for (int t = 1; t < nw; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

/// Blocked variant for long series: f(lo, hi) must return the block value for
/// indices [lo, hi). Block boundaries are fixed by `block` alone.
template <class F>
std::vector<double> parallel_map_blocks(std::size_t n, std::size_t block, int threads, F&& f) {
  const std::size_t nblocks = n == 0 ? 0 : (n + block - 1) / block;
  return parallel_map(nblocks, threads, [&](std::size_t b) {
    const std::size_t lo = b * block;
    const std::size_t hi = std::min(n, lo + block);
    return f(lo, hi);
  });
}

}  // namespace besov
