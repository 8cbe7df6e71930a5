#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "sknn/rational.hpp"

namespace sknn {

/// Seeded randomness handle. Every randomized operation takes one explicitly;
/// identical seeds reproduce identical keys, ciphertexts and transcripts.
/// Not shareable across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [lo, hi], inclusive.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);

  /// Uniform in [lo, hi], inclusive, for arbitrary-size bounds.
  Integer uniform(const Integer& lo, const Integer& hi);

  /// Uniform in [0, 2^bits).
  Integer random_bits(unsigned bits);

  bool coin() { return (engine_() & 1U) != 0; }

  template <class It>
  void shuffle(It first, It last) {
    auto n = last - first;
    for (decltype(n) i = n - 1; i > 0; --i) {
      auto j = static_cast<decltype(n)>(uniform(0, static_cast<std::uint64_t>(i)));
      std::swap(first[i], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sknn
