#pragma once

#include <cstddef>
#include <vector>

#include "sknn/paillier.hpp"
#include "sknn/rational.hpp"

// Values that travel between the parties, shared by both schemes.
namespace sknn {

struct EncTuple {
  std::size_t index = 0;
  Vector coords;
  friend bool operator==(const EncTuple&, const EncTuple&) = default;
};

/// QU -> DO: the query coordinates encrypted under the QU's Paillier key.
struct QueryRequest {
  std::vector<paillier::Ciphertext> q_dot;
  paillier::PublicKey pk;
};

/// DO -> QU: one ciphertext per encrypted-space dimension.
struct BlindedQuery {
  std::vector<paillier::Ciphertext> a;
};

/// QU -> CSP: the decrypted blinded query.
struct CspQuery {
  IntVector q_prime;
  friend bool operator==(const CspQuery&, const CspQuery&) = default;
};

enum class Admission { allow, deny };

struct Refusal {
  std::string reason;
};

}  // namespace sknn
