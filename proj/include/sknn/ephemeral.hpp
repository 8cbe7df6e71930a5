#pragma once

#include <cstddef>
#include <vector>

#include "sknn/rational.hpp"
#include "sknn/rng.hpp"

namespace sknn {

/// Where the per-tuple and per-query secrets come from. The seeded source
/// draws them; a replay source hands back a fixed script.
class EphemeralSource {
 public:
  virtual ~EphemeralSource() = default;

  /// tau value for a b_j = 0 slot other than the last one.
  virtual Rational tau_free() = 0;
  /// t with 0 < t < upper, used in alpha = sum (sigma_j - t_j)^2.
  virtual Rational alpha_offset(const Integer& upper) = 0;
  /// beta1 in query-scale units (beta1 * query_scale).
  virtual Integer beta1_units(const Integer& query_scale) = 0;
  /// beta2 in query-scale units; must exceed beta1_units * sigma_sq_sum.
  virtual Integer beta2_units(const Integer& beta1_units, const Integer& sigma_sq_sum) = 0;
  /// A permutation of 0..d-1.
  virtual std::vector<std::size_t> coordinate_shuffle(std::size_t d) = 0;
  /// Positive exponent for a random r^enc slot, already in query-scale units.
  virtual Integer slot_rand_units() = 0;

  /// True for scripted sources, whose values may not satisfy the sampling
  /// bounds.
  virtual bool replay() const { return false; }

  /// Randomness for Paillier encryption and anything else not scripted.
  virtual Rng& rng() = 0;
};

/// Draws everything from an Rng:
///   tau_free      u/10, u uniform in [1, 10^4]
///   alpha_offset  u/10, u uniform in [1, 10*upper - 1]
///   beta1_units   uniform in [S, 2^16 S]
///   beta2_units   beta1_units * (sigma_sq_sum + 1) + uniform [0, beta1_units - 1]
///   slot units    uniform in [1, 2^16]
class SeededSource final : public EphemeralSource {
 public:
  explicit SeededSource(Rng& rng) : rng_(rng) {}

  Rational tau_free() override;
  Rational alpha_offset(const Integer& upper) override;
  Integer beta1_units(const Integer& query_scale) override;
  Integer beta2_units(const Integer& beta1_units, const Integer& sigma_sq_sum) override;
  std::vector<std::size_t> coordinate_shuffle(std::size_t d) override;
  Integer slot_rand_units() override;
  Rng& rng() override { return rng_; }

 private:
  Rng& rng_;
};

/// Hands back scripted values in order; throws Error when a queue runs dry.
class ReplaySource final : public EphemeralSource {
 public:
  struct Script {
    std::vector<Rational> tau_free;
    std::vector<Rational> alpha_offsets;
    std::vector<Integer> beta1_units;
    std::vector<Integer> beta2_units;
    std::vector<std::vector<std::size_t>> shuffles;
    std::vector<Integer> slot_units;
  };

  ReplaySource(Script script, std::uint64_t seed) : script_(std::move(script)), rng_(seed) {}

  Rational tau_free() override;
  Rational alpha_offset(const Integer& upper) override;
  Integer beta1_units(const Integer& query_scale) override;
  Integer beta2_units(const Integer& beta1_units, const Integer& sigma_sq_sum) override;
  std::vector<std::size_t> coordinate_shuffle(std::size_t d) override;
  Integer slot_rand_units() override;
  bool replay() const override { return true; }
  Rng& rng() override { return rng_; }

 private:
  Script script_;
  std::size_t tau_pos_ = 0, alpha_pos_ = 0, b1_pos_ = 0, b2_pos_ = 0, shuffle_pos_ = 0, slot_pos_ = 0;
  Rng rng_;
};

}  // namespace sknn
