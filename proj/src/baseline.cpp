#include "sknn/baseline.hpp"

#include <string>

#include "sknn/errors.hpp"
#include "sknn/proposed.hpp"

namespace sknn::baseline {

namespace {

constexpr unsigned long kTwo16 = 1UL << 16;

Rational draw_value(Mode mode, Rng& rng) {
  if (mode == Mode::integerized) return Rational(Integer(static_cast<unsigned long>(rng.uniform(1, kTwo16))));
  Rational x(Integer(static_cast<unsigned long>(rng.uniform(1, 10 * kTwo16))), Integer(10));
  x.canonicalize();
  return x;
}

void check_coords(const IntVector& p, const IntVector& bound) {
  if (p.size() != bound.size()) throw DimensionMismatch("point has the wrong number of coordinates");
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (abs(p[j]) > bound[j]) {
      throw CoordinateOutOfBound("coordinate " + std::to_string(j) + " exceeds bound " + bound[j].get_str());
    }
  }
}

}  // namespace

void BaselineParams::validate() const {
  if (d < 1) throw InvalidParams("d must be positive");
  if (c < 1 || epsilon < 1) throw InvalidParams("baseline needs c >= 1 and epsilon >= 1");
}

BaselineKey BaselineKey::assemble(BaselineParams params, Matrix m, Permutation pi, Vector s, Vector tau,
                                  IntVector bound) {
  params.validate();
  const std::size_t eta = params.eta();
  if (m.rows() != eta || m.cols() != eta) throw DimensionMismatch("M must be eta x eta");
  if (pi.size() != eta) throw DimensionMismatch("pi must have eta entries");
  if (s.size() != params.d + 1) throw DimensionMismatch("s must have d + 1 entries");
  if (tau.size() != params.c) throw DimensionMismatch("tau must have c entries");
  if (bound.size() != params.d) throw DimensionMismatch("bound must have d entries");

  BaselineKey key;
  key.params = params;
  key.m = std::move(m);
  key.pi = std::move(pi);
  key.s = std::move(s);
  key.tau = std::move(tau);
  key.bound = std::move(bound);
  key.m_hat = apply_perm_columns(key.m, key.pi.inverse());
  key.m_hat_inv = invert(key.m_hat);
  key.m_hat_inv_scaled = ScaledIntMatrix::from(key.m_hat_inv);
  Matrix scaled = key.m_hat;
  const Integer ms = params.matrix_scale();
  for (std::size_t r = 0; r < eta; ++r) {
    for (std::size_t c = 0; c < eta; ++c) scaled(r, c) *= ms;
  }
  key.m_hat_exps = ScaledIntMatrix::from(scaled);
  if (key.m_hat_exps.denominator != 1) throw InvalidParams("matrix scale does not make M integral");
  return key;
}

BaselineKey keygen(const BaselineParams& params, const Integer& coord_bound, Rng& rng) {
  params.validate();
  const std::size_t eta = params.eta();
  EntryRange range;
  if (params.mode == Mode::integerized) range = EntryRange{1, 99, 1};
  Matrix m = sample_invertible(eta, rng, range);
  Permutation pi = Permutation::random(eta, rng);
  Vector s(params.d + 1);
  for (auto& x : s) x = draw_value(params.mode, rng);
  Vector tau(params.c);
  for (auto& x : tau) x = draw_value(params.mode, rng);
  return BaselineKey::assemble(params, std::move(m), std::move(pi), std::move(s), std::move(tau),
                               IntVector(params.d, coord_bound));
}

Vector draw_tuple_padding(const BaselineKey& key, Rng& rng) {
  Vector v(key.params.epsilon);
  for (auto& x : v) x = draw_value(key.params.mode, rng);
  return v;
}

Vector augment_tuple(const BaselineKey& key, const IntVector& p, const Vector& v) {
  check_coords(p, key.bound);
  if (v.size() != key.params.epsilon) throw DimensionMismatch("padding must have epsilon entries");
  const std::size_t d = key.params.d;
  Vector out;
  out.reserve(key.params.eta());
  for (std::size_t j = 0; j < d; ++j) out.push_back(key.s[j] - 2 * p[j]);
  out.push_back(key.s[d] + Rational(squared_norm(std::span<const Integer>(p))));
  out.insert(out.end(), key.tau.begin(), key.tau.end());
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

EncTuple encrypt_tuple_with(const BaselineKey& key, const IntVector& p, const Vector& v, std::size_t index) {
  return EncTuple{index, vec_mat_mul(augment_tuple(key, p, v), key.m_hat_inv)};
}

EncTuple encrypt_tuple(const BaselineKey& key, const IntVector& p, Rng& rng, std::size_t index) {
  check_coords(p, key.bound);
  return encrypt_tuple_with(key, p, draw_tuple_padding(key, rng), index);
}

std::vector<EncTuple> encrypt_database(const BaselineKey& key, const std::vector<IntVector>& db, Rng& rng,
                                       kernels::Exec exec, OpCounters* counters) {
  std::vector<Vector> rows;
  rows.reserve(db.size());
  for (const auto& p : db) rows.push_back(augment_tuple(key, p, draw_tuple_padding(key, rng)));
  std::uint64_t macs = 0;
  auto enc = kernels::rows_times_matrix(rows, key.m_hat_inv_scaled, exec, &macs);
  if (counters != nullptr) counters->db_encrypt_macs += macs;
  std::vector<EncTuple> out(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) out[i] = EncTuple{i, std::move(enc[i])};
  return out;
}

Vector decrypt_tuple(const BaselineKey& key, const EncTuple& ct) {
  if (ct.coords.size() != key.params.eta()) throw DimensionMismatch("ciphertext has the wrong length");
  Vector p_hat = vec_mat_mul(ct.coords, key.m_hat);
  Vector out(key.params.d);
  for (std::size_t j = 0; j < key.params.d; ++j) out[j] = (key.s[j] - p_hat[j]) / 2;
  return out;
}

QueryEphemerals draw_query_ephemerals(const BaselineKey& key, Rng& rng) {
  QueryEphemerals eph;
  eph.r.resize(key.params.c);
  for (auto& x : eph.r) x = draw_value(key.params.mode, rng);
  eph.beta = Integer(static_cast<unsigned long>(rng.uniform(1, kTwo16)));
  return eph;
}

QueryRequest build_request(const IntVector& q, const paillier::PublicKey& pk, Rng& rng) {
  QueryRequest req;
  req.pk = pk;
  for (const auto& x : q) req.q_dot.push_back(paillier::encrypt(pk, x, rng));
  return req;
}

BlindedQuery blind_query_with(const BaselineKey& key, const QueryRequest& req, const QueryEphemerals& eph, Rng& rng,
                              kernels::Exec exec, OpCounters* counters) {
  const auto& prm = key.params;
  const auto& pk = req.pk;
  if (req.q_dot.size() != prm.d) throw DimensionMismatch("query request has the wrong dimension");
  if (eph.r.size() != prm.c || eph.beta <= 0) throw InvalidParams("malformed query ephemerals");
  const Integer R = prm.query_scale();
  OpCounters local;

  std::vector<paillier::Ciphertext> qbar;
  qbar.reserve(prm.eta());
  for (const auto& c : req.q_dot) qbar.push_back(paillier::hom_scale(pk, c, R));
  local.query_powers += prm.d;
  qbar.push_back(paillier::encrypt(pk, R, rng));
  for (const auto& x : eph.r) {
    Rational scaled = x * R;
    if (!is_integer(scaled)) throw InvalidParams("r has more precision than the query scale");
    qbar.push_back(paillier::encrypt(pk, scaled.get_num(), rng));
  }
  for (std::size_t t = 0; t < prm.epsilon; ++t) qbar.push_back(paillier::encrypt(pk, Integer(0), rng));
  local.slot_encodings += prm.eta() - prm.d;

  ScaledIntMatrix exps = key.m_hat_exps;
  for (auto& e : exps.numerators) e *= eph.beta;
  BlindedQuery out;
  out.a = kernels::encrypted_mat_vec(pk, exps, qbar, exec, &local.matrix_exps);
  local.query_blind_macs += static_cast<std::uint64_t>(prm.eta()) * prm.eta();
  if (counters != nullptr) *counters += local;
  return out;
}

BlindedQuery blind_query(const BaselineKey& key, const QueryRequest& req, Rng& rng, kernels::Exec exec,
                         OpCounters* counters) {
  QueryEphemerals eph = draw_query_ephemerals(key, rng);
  return blind_query_with(key, req, eph, rng, exec, counters);
}

std::vector<std::size_t> knn(const std::vector<EncTuple>& edb, const CspQuery& q, std::size_t k,
                             kernels::Exec exec, OpCounters* counters) {
  // same comparison as the proposed scheme: smaller p'.q' is nearer
  return proposed::csp_knn(edb, q, k, exec, counters);
}

Integer residual_bound(const BaselineParams& params) {
  // scaled entries stay below 99 in both modes; scaled r below R * 2^16
  return Integer(99) * params.query_scale() * (1 + Integer(static_cast<unsigned long>(params.c)) * kTwo16);
}

}  // namespace sknn::baseline
