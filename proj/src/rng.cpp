#include "sknn/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace sknn {

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw std::invalid_argument("Rng::uniform: empty range");
  std::uint64_t span = hi - lo;
  if (span == UINT64_MAX) return engine_();
  // rejection sampling keeps the draw unbiased and independent of the
  // standard library's distribution implementation
  std::uint64_t range = span + 1;
  std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + x % range;
}

Integer Rng::random_bits(unsigned bits) {
  Integer out = 0;
  unsigned produced = 0;
  while (produced < bits) {
    unsigned take = std::min(64U, bits - produced);
    std::uint64_t word = engine_();
    if (take < 64) word &= (std::uint64_t{1} << take) - 1;
    Integer chunk;
    mpz_import(chunk.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
    out <<= take;
    out += chunk;
    produced += take;
  }
  return out;
}

Integer Rng::uniform(const Integer& lo, const Integer& hi) {
  if (lo > hi) throw std::invalid_argument("Rng::uniform: empty range");
  Integer range = hi - lo + 1;
  unsigned bits = static_cast<unsigned>(mpz_sizeinbase(range.get_mpz_t(), 2));
  Integer x;
  do {
    x = random_bits(bits);
  } while (x >= range);
  return lo + x;
}

}  // namespace sknn
