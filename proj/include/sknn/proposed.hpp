#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sknn/counters.hpp"
#include "sknn/ephemeral.hpp"
#include "sknn/kernels.hpp"
#include "sknn/matrix.hpp"
#include "sknn/paillier.hpp"
#include "sknn/protocol.hpp"

namespace sknn::proposed {

enum class AlphaForm {
  per_coordinate,  // alpha = sum_j (sigma_j - t_j)^2
  scalar,          // alpha = (sigma_max - t)^2
};

struct SecurityParams {
  std::size_t d = 0;
  std::size_t c = 0;
  std::size_t epsilon = 0;
  Integer data_scale = 1000;
  Integer matrix_scale = 10;
  Integer query_scale = 100;
  AlphaForm alpha_form = AlphaForm::per_coordinate;

  std::size_t eta() const { return d + 2 + c + epsilon; }
  std::size_t slots() const { return c + epsilon; }

  /// Throws InvalidParams unless 1 < c <= d, epsilon >= 2 and all scales are
  /// positive. Returns warnings (c == d).
  std::vector<std::string> validate() const;
};

/// The data owner's long-term secret.
struct OwnerKey {
  SecurityParams params;
  Matrix m;
  Permutation pi;
  Vector s;                  // d + 1
  IntVector sigma;           // d, sigma_j > bound_j
  std::vector<std::uint8_t> b;  // c + epsilon bits
  IntVector w;               // c + epsilon positive integers
  IntVector bound;           // per-coordinate plaintext bound, integerized

  // derived
  Matrix m_hat;              // column j = column pi^{-1}(j) of m
  Matrix m_hat_inv;
  ScaledIntMatrix m_hat_inv_scaled;
  ScaledIntMatrix m_hat_exps;  // matrix_scale * m_hat, integral

  /// Validates the components and fills the derived fields. Throws
  /// InvalidParams, SingularMatrix or DimensionMismatch.
  static OwnerKey assemble(SecurityParams params, Matrix m, Permutation pi, Vector s, IntVector sigma,
                           std::vector<std::uint8_t> b, IntVector w, IntVector bound);

  std::size_t last_zero() const;
  std::size_t last_one() const;
  Integer sigma_sq_sum() const;
};

/// Samples a fresh key. Every sigma_j exceeds `coord_bound`; w_j in [1, 100];
/// s_j integers in [1, 2^16]; M from sample_invertible.
OwnerKey keygen(const SecurityParams& params, const Integer& coord_bound, Rng& rng);

struct TupleSecrets {
  Vector tau;  // c + epsilon
  Rational alpha;
  Vector t;    // offsets behind alpha (d of them, or one in scalar form)
};

TupleSecrets gen_tau(const OwnerKey& key, EphemeralSource& src);

/// (s_1 - 2p_1, ..., s_d - 2p_d, s_{d+1} + |p|^2, alpha, tau)
Vector augment_tuple(const OwnerKey& key, const IntVector& p, const TupleSecrets& secrets);

/// Throws CoordinateOutOfBound unless |p_j| <= bound_j for every j.
EncTuple encrypt_tuple(const OwnerKey& key, const IntVector& p, EphemeralSource& src, std::size_t index = 0);
EncTuple encrypt_tuple_with(const OwnerKey& key, const IntVector& p, const TupleSecrets& secrets,
                            std::size_t index = 0);

/// Secrets are drawn serially (so results do not depend on the thread
/// count); the matrix products run through the selected kernel.
std::vector<EncTuple> encrypt_database(const OwnerKey& key, const std::vector<IntVector>& db, EphemeralSource& src,
                                       kernels::Exec exec = kernels::Exec::parallel, OpCounters* counters = nullptr);

/// p_j = (s_j - (p' M_hat)_j) / 2. No integrity check: a tuple encrypted
/// under another key decrypts to garbage rather than failing.
Vector decrypt_tuple(const OwnerKey& key, const EncTuple& ct);

/// Copy with every coordinate rounded to `digits` decimals.
EncTuple quantize_tuple(const EncTuple& ct, unsigned digits);

/// What the QU is allowed to know about the data domain.
struct PublicQueryDomain {
  std::size_t d = 0;
  IntVector bound;
};
PublicQueryDomain public_domain(const OwnerKey& key);

/// Throws CoordinateOutOfBound or DimensionMismatch.
QueryRequest qu_build_request(const IntVector& q, const PublicQueryDomain& domain, const paillier::PublicKey& pk,
                              Rng& rng);

struct QuerySecrets {
  Integer beta1_units;
  Integer beta2_units;
  std::vector<std::size_t> v;
  IntVector slot_units;  // per r^enc slot: block/free exponents, 0 elsewhere
  Integer multiplier = 1;  // uniform factor keeping nom_q integral
};

/// Throws InvalidParams when a seeded draw violates beta2 > beta1 * sum sigma^2
/// (replay sources are exempt).
QuerySecrets draw_query_secrets(const OwnerKey& key, EphemeralSource& src);

struct Blinding {
  BlindedQuery blinded;
  QuerySecrets secrets;
  std::vector<paillier::Ciphertext> r_enc;
};

/// Throws NormalizerOverflow when a plaintext could reach n/2 for any query
/// inside the public domain.
Blinding blind_query_with(const OwnerKey& key, const QueryRequest& req, const QuerySecrets& secrets, Rng& rng,
                          kernels::Exec exec = kernels::Exec::parallel, OpCounters* counters = nullptr);

std::variant<Blinding, Refusal> do_blind_query(const OwnerKey& key, const QueryRequest& req, Admission policy,
                                               EphemeralSource& src, kernels::Exec exec = kernels::Exec::parallel,
                                               OpCounters* counters = nullptr);

CspQuery qu_unwrap(const paillier::PrivateKey& sk, const BlindedQuery& bq);

Rational csp_score(const EncTuple& ct, const CspQuery& q);

/// Throws KTooLarge when k > |edb|, InvalidParams when k == 0.
std::vector<std::size_t> csp_knn(const std::vector<EncTuple>& edb, const CspQuery& q, std::size_t k,
                                 kernels::Exec exec = kernels::Exec::parallel, OpCounters* counters = nullptr);

}  // namespace sknn::proposed
