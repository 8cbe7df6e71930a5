#pragma once

#include <cstdint>

namespace sknn {

/// Deterministic operation counts per protocol phase. Multiply-accumulates
/// are counted over the matrix/vector kernels; Paillier work is split into
/// the exponentiations by matrix entries, the slot encodings (fresh
/// encryptions or re-randomized slot ciphertexts), and the d query powers.
struct OpCounters {
  std::uint64_t keygen_entries = 0;
  std::uint64_t db_encrypt_macs = 0;
  std::uint64_t query_blind_macs = 0;
  std::uint64_t knn_macs = 0;
  std::uint64_t matrix_exps = 0;
  std::uint64_t slot_encodings = 0;
  std::uint64_t query_powers = 0;

  std::uint64_t paillier_ops() const { return matrix_exps + slot_encodings; }

  OpCounters& operator+=(const OpCounters& o) {
    keygen_entries += o.keygen_entries;
    db_encrypt_macs += o.db_encrypt_macs;
    query_blind_macs += o.query_blind_macs;
    knn_macs += o.knn_macs;
    matrix_exps += o.matrix_exps;
    slot_encodings += o.slot_encodings;
    query_powers += o.query_powers;
    return *this;
  }
  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

}  // namespace sknn
