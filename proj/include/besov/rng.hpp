// Counter-based random number generation. Every draw is a pure function of
// (key, counter), so replicated experiments can be sharded across threads in
// any order and still produce bitwise-identical streams.

#pragma once

#include <cstdint>
#include <initializer_list>

#include "besov/specfun.hpp"

namespace besov {

namespace detail {

// SplitMix64 finalizer; bijective 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Derives a stream key from a seed plus any number of stream identifiers
/// (replicate index, coefficient index, draw index, ...).
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = 0x8af1d7699f52b2e1ULL;
  for (std::uint64_t id : ids) h = detail::mix64((h + id) * detail::golden + 0x1b873593ULL);
  return h;
}

/// Value of stream `key` at position `counter`; the whole stream is random
/// access.
inline std::uint64_t rng_at(std::uint64_t key, std::uint64_t counter) {
  return detail::mix64(key + counter * detail::golden);
}

/// Uniform on the open interval (0,1), 53-bit resolution, never 0 or 1.
inline double uniform_at(std::uint64_t key, std::uint64_t counter) {
  return (static_cast<double>(rng_at(key, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal via inverse CDF; one counter slot per draw.
inline double normal_at(std::uint64_t key, std::uint64_t counter) {
  return specfun::normal_quantile(uniform_at(key, counter));
}

/// Sequential view over one counter-based stream, for consumers that need a
/// variable number of draws (rejection samplers).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  double uniform() { return uniform_at(key_, ctr_++); }
  double normal() { return normal_at(key_, ctr_++); }
  std::uint64_t bits() { return rng_at(key_, ctr_++); }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace besov
