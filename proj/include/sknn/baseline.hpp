#pragma once

#include <cstddef>
#include <vector>

#include "sknn/counters.hpp"
#include "sknn/kernels.hpp"
#include "sknn/matrix.hpp"
#include "sknn/paillier.hpp"
#include "sknn/protocol.hpp"

// The earlier ASPE-style scheme: one query-wide scale factor beta_q and a
// query tuple padded with literal zeros. Kept faithful so the attacks have a
// real target.
namespace sknn::baseline {

enum class Mode {
  integerized,  // integer M in [1, 99], integer s, tau, v, r, beta
  real,         // M entries in [0.1, 9.9] step 0.1, tau/v/r with one decimal
};

struct BaselineParams {
  std::size_t d = 0;
  std::size_t c = 0;
  std::size_t epsilon = 0;
  Mode mode = Mode::integerized;

  std::size_t eta() const { return d + 1 + c + epsilon; }
  /// Factor that makes M_hat integral (1 or 10).
  Integer matrix_scale() const { return mode == Mode::integerized ? 1 : 10; }
  /// Factor that makes the query tuple integral (1 or 10).
  Integer query_scale() const { return mode == Mode::integerized ? 1 : 10; }
  void validate() const;
};

struct BaselineKey {
  BaselineParams params;
  Matrix m;
  Permutation pi;
  Vector s;    // d + 1
  Vector tau;  // c, long-term
  IntVector bound;

  Matrix m_hat;  // column j = column pi^{-1}(j) of m
  Matrix m_hat_inv;
  ScaledIntMatrix m_hat_inv_scaled;
  ScaledIntMatrix m_hat_exps;  // matrix_scale * m_hat

  static BaselineKey assemble(BaselineParams params, Matrix m, Permutation pi, Vector s, Vector tau, IntVector bound);
};

BaselineKey keygen(const BaselineParams& params, const Integer& coord_bound, Rng& rng);

/// (s_1 - 2p_1, ..., s_d - 2p_d, s_{d+1} + |p|^2, tau, v)
Vector augment_tuple(const BaselineKey& key, const IntVector& p, const Vector& v);
Vector draw_tuple_padding(const BaselineKey& key, Rng& rng);

EncTuple encrypt_tuple(const BaselineKey& key, const IntVector& p, Rng& rng, std::size_t index = 0);
EncTuple encrypt_tuple_with(const BaselineKey& key, const IntVector& p, const Vector& v, std::size_t index = 0);
std::vector<EncTuple> encrypt_database(const BaselineKey& key, const std::vector<IntVector>& db, Rng& rng,
                                       kernels::Exec exec = kernels::Exec::parallel, OpCounters* counters = nullptr);
Vector decrypt_tuple(const BaselineKey& key, const EncTuple& ct);

struct QueryEphemerals {
  Vector r;  // c
  Integer beta;
};
QueryEphemerals draw_query_ephemerals(const BaselineKey& key, Rng& rng);

/// Encrypts each coordinate; no bound check, the baseline DO never sees q.
QueryRequest build_request(const IntVector& q, const paillier::PublicKey& pk, Rng& rng);

/// Element i decrypts to beta * ms * R * sum_j M_hat_ij q_hat_j with
/// q_hat = (q, 1, r, 0_epsilon).
BlindedQuery blind_query_with(const BaselineKey& key, const QueryRequest& req, const QueryEphemerals& eph, Rng& rng,
                              kernels::Exec exec = kernels::Exec::parallel, OpCounters* counters = nullptr);
BlindedQuery blind_query(const BaselineKey& key, const QueryRequest& req, Rng& rng,
                         kernels::Exec exec = kernels::Exec::parallel, OpCounters* counters = nullptr);

std::vector<std::size_t> knn(const std::vector<EncTuple>& edb, const CspQuery& q, std::size_t k,
                             kernels::Exec exec = kernels::Exec::parallel, OpCounters* counters = nullptr);

/// Bound on |M_hat entry| * (1 + sum |r_t|) for the current parameters; the
/// level-1 attack's N defaults to 2^32 times this.
Integer residual_bound(const BaselineParams& params);

}  // namespace sknn::baseline
