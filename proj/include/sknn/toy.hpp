#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sknn/ephemeral.hpp"
#include "sknn/proposed.hpp"

// The worked two-point example: d = 2, c = 2, epsilon = 4, integer data
// (data scale 1), a fixed key, and a replay profile for every random draw.
namespace sknn::toy {

proposed::SecurityParams params();
proposed::OwnerKey owner_key();
std::vector<IntVector> database();  // (6,7), (4,5)
IntVector query();                  // (3,9)

/// tau rand 3, 3; t = (7,4), (2,3); beta1 = 4, beta2 = 44 (x100);
/// v = (0,1); slot exponents 2100, 200, 600. Paillier randomness comes from
/// `seed`.
ReplaySource source(std::uint64_t seed);

/// Reference values the demo compares against.
struct Expected {
  Rational nom_p;
  Integer nom_q;
  std::vector<std::vector<std::string>> p_prime;  // 3-decimal strings
  IntVector q_prime;
  std::vector<std::string> scores;  // 3-decimal strings
  std::size_t nearest;
};
Expected expected();

}  // namespace sknn::toy
