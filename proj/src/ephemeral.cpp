#include "sknn/ephemeral.hpp"

#include <numeric>

#include "sknn/errors.hpp"

namespace sknn {

namespace {

constexpr std::uint64_t kTwo16 = 1ULL << 16;

template <class T>
const T& next(const std::vector<T>& queue, std::size_t& pos, const char* what) {
  if (pos >= queue.size()) throw Error(std::string("replay script exhausted: ") + what);
  return queue[pos++];
}

}  // namespace

Rational SeededSource::tau_free() {
  Rational t(rng_.uniform(1, 10000), 10);
  t.canonicalize();
  return t;
}

Rational SeededSource::alpha_offset(const Integer& upper) {
  if (upper <= 0) throw InvalidParams("alpha offset needs a positive upper bound");
  Rational t(rng_.uniform(Integer(1), Integer(10 * upper - 1)), 10);
  t.canonicalize();
  return t;
}

Integer SeededSource::beta1_units(const Integer& query_scale) {
  return rng_.uniform(query_scale, Integer(query_scale * kTwo16));
}

Integer SeededSource::beta2_units(const Integer& beta1_units, const Integer& sigma_sq_sum) {
  return beta1_units * (sigma_sq_sum + 1) + rng_.uniform(Integer(0), Integer(beta1_units - 1));
}

std::vector<std::size_t> SeededSource::coordinate_shuffle(std::size_t d) {
  std::vector<std::size_t> v(d);
  std::iota(v.begin(), v.end(), std::size_t{0});
  rng_.shuffle(v.begin(), v.end());
  return v;
}

Integer SeededSource::slot_rand_units() { return Integer(static_cast<unsigned long>(rng_.uniform(1, kTwo16))); }

Rational ReplaySource::tau_free() { return next(script_.tau_free, tau_pos_, "tau"); }

Rational ReplaySource::alpha_offset(const Integer&) { return next(script_.alpha_offsets, alpha_pos_, "alpha offset"); }

Integer ReplaySource::beta1_units(const Integer&) { return next(script_.beta1_units, b1_pos_, "beta1"); }

Integer ReplaySource::beta2_units(const Integer&, const Integer&) { return next(script_.beta2_units, b2_pos_, "beta2"); }

std::vector<std::size_t> ReplaySource::coordinate_shuffle(std::size_t d) {
  const auto& v = next(script_.shuffles, shuffle_pos_, "coordinate shuffle");
  if (v.size() != d) throw DimensionMismatch("scripted shuffle has the wrong length");
  return v;
}

Integer ReplaySource::slot_rand_units() { return next(script_.slot_units, slot_pos_, "slot exponent"); }

}  // namespace sknn
