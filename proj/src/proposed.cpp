#include "sknn/proposed.hpp"

#include <algorithm>
#include <string>

#include "sknn/errors.hpp"

namespace sknn::proposed {

namespace {

using paillier::Ciphertext;

void check_coords(const IntVector& p, const IntVector& bound) {
  if (p.size() != bound.size()) {
    throw DimensionMismatch("point has " + std::to_string(p.size()) + " coordinates, expected " +
                            std::to_string(bound.size()));
  }
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (abs(p[j]) > bound[j]) {
      throw CoordinateOutOfBound("coordinate " + std::to_string(j) + " = " + p[j].get_str() + " exceeds bound " +
                                 bound[j].get_str());
    }
  }
}

// Half-open range of v positions feeding r^enc block j.
std::pair<std::size_t, std::size_t> block_range(std::size_t j, std::size_t d, std::size_t c) {
  const std::size_t width = d / c;
  const std::size_t lo = j * width;
  const std::size_t hi = (j + 1 == c) ? d : (j + 1) * width;
  return {lo, hi};
}

Integer gcd(const Integer& a, const Integer& b) {
  Integer g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

}  // namespace

std::vector<std::string> SecurityParams::validate() const {
  if (d < 2) throw InvalidParams("d must be at least 2 (need 1 < c <= d)");
  if (c <= 1 || c > d) throw InvalidParams("c must satisfy 1 < c <= d, got c=" + std::to_string(c));
  if (epsilon < 2) throw InvalidParams("epsilon must be at least 2, got " + std::to_string(epsilon));
  if (data_scale <= 0 || matrix_scale <= 0 || query_scale <= 0) throw InvalidParams("scales must be positive");
  std::vector<std::string> warnings;
  if (c == d) warnings.emplace_back("c == d: every r^enc block covers a single coordinate");
  return warnings;
}

OwnerKey OwnerKey::assemble(SecurityParams params, Matrix m, Permutation pi, Vector s, IntVector sigma,
                            std::vector<std::uint8_t> b, IntVector w, IntVector bound) {
  params.validate();
  const std::size_t eta = params.eta();
  const std::size_t slots = params.slots();
  if (m.rows() != eta || m.cols() != eta) throw DimensionMismatch("M must be eta x eta");
  if (pi.size() != eta) throw DimensionMismatch("pi must have eta entries");
  if (s.size() != params.d + 1) throw DimensionMismatch("s must have d + 1 entries");
  if (sigma.size() != params.d || bound.size() != params.d) throw DimensionMismatch("sigma and bound need d entries");
  if (b.size() != slots || w.size() != slots) throw DimensionMismatch("b and w need c + epsilon entries");

  for (std::size_t j = 0; j < params.c; ++j) {
    if (b[j] != 1) throw InvalidParams("the first c bits of b must be 1");
  }
  bool zero = false;
  bool one = false;
  for (std::size_t j = params.c; j < slots; ++j) {
    if (b[j] > 1) throw InvalidParams("b must be a bit string");
    (b[j] == 0 ? zero : one) = true;
  }
  if (!zero || !one) throw InvalidParams("the epsilon segment of b needs at least one 0 and one 1");
  for (const auto& x : w) {
    if (x <= 0) throw InvalidParams("w entries must be positive integers");
  }
  for (std::size_t j = 0; j < params.d; ++j) {
    if (bound[j] < 0) throw InvalidParams("coordinate bounds must be non-negative");
    if (sigma[j] <= bound[j]) throw InvalidParams("sigma_" + std::to_string(j) + " must exceed the coordinate bound");
  }

  OwnerKey key;
  key.params = std::move(params);
  key.m = std::move(m);
  key.pi = std::move(pi);
  key.s = std::move(s);
  key.sigma = std::move(sigma);
  key.b = std::move(b);
  key.w = std::move(w);
  key.bound = std::move(bound);

  key.m_hat = apply_perm_columns(key.m, key.pi.inverse());
  key.m_hat_inv = invert(key.m_hat);
  key.m_hat_inv_scaled = ScaledIntMatrix::from(key.m_hat_inv);
  Matrix scaled = key.m_hat;
  for (std::size_t r = 0; r < eta; ++r) {
    for (std::size_t c = 0; c < eta; ++c) scaled(r, c) *= key.params.matrix_scale;
  }
  key.m_hat_exps = ScaledIntMatrix::from(scaled);
  if (key.m_hat_exps.denominator != 1) throw InvalidParams("matrix_scale does not make M integral");
  return key;
}

std::size_t OwnerKey::last_zero() const {
  for (std::size_t j = b.size(); j-- > 0;) {
    if (b[j] == 0) return j;
  }
  throw InvalidParams("b has no 0 bit");
}

std::size_t OwnerKey::last_one() const {
  for (std::size_t j = b.size(); j-- > 0;) {
    if (b[j] == 1) return j;
  }
  throw InvalidParams("b has no 1 bit");
}

Integer OwnerKey::sigma_sq_sum() const { return squared_norm(std::span<const Integer>(sigma)); }

OwnerKey keygen(const SecurityParams& params, const Integer& coord_bound, Rng& rng) {
  params.validate();
  if (coord_bound < 0) throw InvalidParams("coordinate bound must be non-negative");
  const std::size_t eta = params.eta();
  Matrix m = sample_invertible(eta, rng);
  Permutation pi = Permutation::random(eta, rng);

  Vector s(params.d + 1);
  for (auto& x : s) x = Rational(rng.uniform(Integer(1), Integer(1) << 16));

  IntVector sigma(params.d);
  const Integer spread = coord_bound > 0 ? coord_bound : Integer(1);
  for (auto& x : sigma) x = coord_bound + rng.uniform(Integer(1), spread);

  std::vector<std::uint8_t> b(params.slots(), 1);
  for (;;) {
    bool zero = false;
    bool one = false;
    for (std::size_t j = params.c; j < b.size(); ++j) {
      b[j] = rng.coin() ? 1 : 0;
      (b[j] == 0 ? zero : one) = true;
    }
    if (zero && one) break;
  }

  IntVector w(params.slots());
  for (auto& x : w) x = rng.uniform(Integer(1), Integer(100));

  return OwnerKey::assemble(params, std::move(m), std::move(pi), std::move(s), std::move(sigma), std::move(b),
                            std::move(w), IntVector(params.d, coord_bound));
}

TupleSecrets gen_tau(const OwnerKey& key, EphemeralSource& src) {
  TupleSecrets out;
  const std::size_t slots = key.params.slots();
  const std::size_t last0 = key.last_zero();
  out.tau.resize(slots);
  Rational acc = 0;
  for (std::size_t j = 0; j < slots; ++j) {
    if (j == last0) continue;
    out.tau[j] = key.b[j] == 1 ? Rational(key.w[j]) : src.tau_free();
    acc += out.tau[j] * key.w[j];
  }
  out.tau[last0] = -acc / key.w[last0];

  auto offset = [&](const Integer& upper) {
    Rational t = src.alpha_offset(upper);
    if (t <= 0 || t >= upper) throw InvalidParams("alpha offset outside (0, sigma)");
    return t;
  };
  out.alpha = 0;
  if (key.params.alpha_form == AlphaForm::per_coordinate) {
    for (const auto& sj : key.sigma) {
      Rational t = offset(sj);
      Rational diff = sj - t;
      out.alpha += diff * diff;
      out.t.push_back(t);
    }
  } else {
    Integer smax = *std::max_element(key.sigma.begin(), key.sigma.end());
    Rational t = offset(smax);
    Rational diff = smax - t;
    out.alpha = diff * diff;
    out.t.push_back(t);
  }
  return out;
}

Vector augment_tuple(const OwnerKey& key, const IntVector& p, const TupleSecrets& secrets) {
  check_coords(p, key.bound);
  const std::size_t d = key.params.d;
  if (secrets.tau.size() != key.params.slots()) throw DimensionMismatch("tau has the wrong length");
  Vector out;
  out.reserve(key.params.eta());
  for (std::size_t j = 0; j < d; ++j) out.push_back(key.s[j] - 2 * p[j]);
  out.push_back(key.s[d] + Rational(squared_norm(std::span<const Integer>(p))));
  out.push_back(secrets.alpha);
  out.insert(out.end(), secrets.tau.begin(), secrets.tau.end());
  return out;
}

EncTuple encrypt_tuple_with(const OwnerKey& key, const IntVector& p, const TupleSecrets& secrets, std::size_t index) {
  return EncTuple{index, vec_mat_mul(augment_tuple(key, p, secrets), key.m_hat_inv)};
}

EncTuple encrypt_tuple(const OwnerKey& key, const IntVector& p, EphemeralSource& src, std::size_t index) {
  check_coords(p, key.bound);
  return encrypt_tuple_with(key, p, gen_tau(key, src), index);
}

std::vector<EncTuple> encrypt_database(const OwnerKey& key, const std::vector<IntVector>& db, EphemeralSource& src,
                                       kernels::Exec exec, OpCounters* counters) {
  std::vector<Vector> rows;
  rows.reserve(db.size());
  for (const auto& p : db) {
    check_coords(p, key.bound);
    rows.push_back(augment_tuple(key, p, gen_tau(key, src)));
  }
  std::uint64_t macs = 0;
  auto enc = kernels::rows_times_matrix(rows, key.m_hat_inv_scaled, exec, &macs);
  if (counters != nullptr) counters->db_encrypt_macs += macs;
  std::vector<EncTuple> out(db.size());
  for (std::size_t i = 0; i < db.size(); ++i) out[i] = EncTuple{i, std::move(enc[i])};
  return out;
}

Vector decrypt_tuple(const OwnerKey& key, const EncTuple& ct) {
  if (ct.coords.size() != key.params.eta()) throw DimensionMismatch("ciphertext has the wrong length");
  Vector p_hat = vec_mat_mul(ct.coords, key.m_hat);
  Vector out(key.params.d);
  for (std::size_t j = 0; j < key.params.d; ++j) out[j] = (key.s[j] - p_hat[j]) / 2;
  return out;
}

EncTuple quantize_tuple(const EncTuple& ct, unsigned digits) {
  EncTuple out{ct.index, {}};
  out.coords.reserve(ct.coords.size());
  for (const auto& x : ct.coords) out.coords.push_back(round_to(x, digits));
  return out;
}

PublicQueryDomain public_domain(const OwnerKey& key) { return {key.params.d, key.bound}; }

QueryRequest qu_build_request(const IntVector& q, const PublicQueryDomain& domain, const paillier::PublicKey& pk,
                              Rng& rng) {
  check_coords(q, domain.bound);
  QueryRequest req;
  req.pk = pk;
  req.q_dot.reserve(q.size());
  for (const auto& x : q) req.q_dot.push_back(paillier::encrypt(pk, x, rng));
  return req;
}

QuerySecrets draw_query_secrets(const OwnerKey& key, EphemeralSource& src) {
  const auto& prm = key.params;
  QuerySecrets out;
  out.beta1_units = src.beta1_units(prm.query_scale);
  const Integer sig2 = key.sigma_sq_sum();
  out.beta2_units = src.beta2_units(out.beta1_units, sig2);
  if (out.beta1_units <= 0) throw InvalidParams("beta1 must be positive");
  if (!src.replay() && out.beta2_units <= out.beta1_units * sig2) {
    throw InvalidParams("beta2 must exceed beta1 * sum sigma_j^2");
  }
  out.v = src.coordinate_shuffle(prm.d);
  Permutation check(out.v);  // throws unless a bijection
  (void)check;

  const std::size_t last1 = key.last_one();
  out.slot_units.assign(prm.slots(), Integer(0));
  for (std::size_t j = 0; j < prm.slots(); ++j) {
    if (j < prm.c || (key.b[j] == 1 && j != last1)) {
      out.slot_units[j] = src.slot_rand_units();
      if (out.slot_units[j] <= 0) throw InvalidParams("slot exponents must be positive");
    }
  }

  // Known multiplier e_j per slot; nom_q = sum_j (D w_j e_j / w_L) X_j needs
  // integral coefficients.
  Integer g = 0;
  for (std::size_t j = 0; j < prm.slots(); ++j) {
    if (j == last1) continue;
    Integer e = key.b[j] == 1 ? out.slot_units[j] : Integer(key.w[j] * prm.query_scale);
    g = gcd(g, Integer(key.w[j] * e));
  }
  const Integer& wl = key.w[last1];
  out.multiplier = wl / gcd(wl, g);
  return out;
}

Blinding blind_query_with(const OwnerKey& key, const QueryRequest& req, const QuerySecrets& secrets, Rng& rng,
                          kernels::Exec exec, OpCounters* counters) {
  const auto& prm = key.params;
  const auto& pk = req.pk;
  const std::size_t d = prm.d;
  const std::size_t slots = prm.slots();
  const std::size_t last1 = key.last_one();
  if (req.q_dot.size() != d) throw DimensionMismatch("query request has the wrong dimension");
  if (secrets.slot_units.size() != slots || secrets.v.size() != d) {
    throw DimensionMismatch("query secrets do not match the key");
  }
  const Integer& D = secrets.multiplier;
  const Integer& S = prm.query_scale;
  const Integer& wl = key.w[last1];

  // Plaintext magnitude bounds for every q-bar slot, assuming |q_j| <= bound_j.
  std::vector<Integer> mag(prm.eta());
  for (std::size_t j = 0; j < d; ++j) mag[j] = secrets.beta2_units * key.bound[j];
  mag[d] = secrets.beta2_units;
  mag[d + 1] = secrets.beta1_units;

  std::vector<Integer> coef(slots);    // contribution of slot j to nom_q
  std::vector<Integer> xbound(slots);  // |X_j| bound
  Integer known = 0;
  for (std::size_t j = 0; j < slots; ++j) {
    if (j == last1) continue;
    Integer e;
    if (j < prm.c) {
      e = secrets.slot_units[j];
      auto [lo, hi] = block_range(j, d, prm.c);
      xbound[j] = 0;
      for (std::size_t t = lo; t < hi; ++t) xbound[j] += key.bound[secrets.v[t]];
    } else {
      e = key.b[j] == 1 ? secrets.slot_units[j] : Integer(key.w[j] * S);
      xbound[j] = 1;
      known += D * key.w[j] * e / wl;
    }
    coef[j] = D * key.w[j] * e / wl;
    mag[d + 2 + j] = D * e * xbound[j];
  }
  Integer nom_bound = abs(known);
  for (std::size_t j = 0; j < prm.c; ++j) nom_bound += abs(coef[j]) * xbound[j];
  mag[d + 2 + last1] = nom_bound;

  Integer worst = 0;
  for (const auto& x : mag) worst = std::max(worst, x);
  for (std::size_t i = 0; i < prm.eta(); ++i) {
    Integer acc = 0;
    for (std::size_t j = 0; j < prm.eta(); ++j) acc += abs(key.m_hat_exps.at(i, j)) * mag[j];
    worst = std::max(worst, acc);
  }
  if (2 * worst >= pk.n) {
    throw NormalizerOverflow("blinded query plaintexts could reach n/2; use a larger Paillier modulus");
  }

  Blinding out;
  out.secrets = secrets;
  OpCounters local;

  // r^enc
  out.r_enc.resize(slots);
  std::vector<Ciphertext> blocks(prm.c);
  for (std::size_t j = 0; j < prm.c; ++j) {
    auto [lo, hi] = block_range(j, d, prm.c);
    Ciphertext acc = req.q_dot[secrets.v[lo]];
    for (std::size_t t = lo + 1; t < hi; ++t) acc = paillier::hom_add(pk, acc, req.q_dot[secrets.v[t]]);
    blocks[j] = acc;
    out.r_enc[j] = paillier::hom_scale(pk, acc, Integer(-D * secrets.slot_units[j]));
  }
  for (std::size_t j = prm.c; j < slots; ++j) {
    if (j == last1) continue;
    Integer e = key.b[j] == 1 ? secrets.slot_units[j] : Integer(key.w[j] * S);
    out.r_enc[j] = paillier::encrypt(pk, Integer(-D * e), rng);
  }
  Ciphertext nom = paillier::encrypt(pk, known, rng);
  for (std::size_t j = 0; j < prm.c; ++j) nom = paillier::hom_add(pk, nom, paillier::hom_scale(pk, blocks[j], coef[j]));
  out.r_enc[last1] = nom;
  local.slot_encodings += slots;

  // q-bar = (q_dot^beta2, E(beta2), E(beta1), r^enc), all in query-scale units
  std::vector<Ciphertext> qbar;
  qbar.reserve(prm.eta());
  for (std::size_t j = 0; j < d; ++j) qbar.push_back(paillier::hom_scale(pk, req.q_dot[j], secrets.beta2_units));
  local.query_powers += d;
  qbar.push_back(paillier::encrypt(pk, secrets.beta2_units, rng));
  qbar.push_back(paillier::encrypt(pk, secrets.beta1_units, rng));
  local.slot_encodings += 2;
  qbar.insert(qbar.end(), out.r_enc.begin(), out.r_enc.end());

  out.blinded.a = kernels::encrypted_mat_vec(pk, key.m_hat_exps, qbar, exec, &local.matrix_exps);
  local.query_blind_macs += static_cast<std::uint64_t>(prm.eta()) * prm.eta();
  if (counters != nullptr) *counters += local;
  return out;
}

std::variant<Blinding, Refusal> do_blind_query(const OwnerKey& key, const QueryRequest& req, Admission policy,
                                               EphemeralSource& src, kernels::Exec exec, OpCounters* counters) {
  if (policy == Admission::deny) return Refusal{"query refused by data owner policy"};
  QuerySecrets secrets = draw_query_secrets(key, src);
  return blind_query_with(key, req, secrets, src.rng(), exec, counters);
}

CspQuery qu_unwrap(const paillier::PrivateKey& sk, const BlindedQuery& bq) {
  CspQuery out;
  out.q_prime.reserve(bq.a.size());
  for (const auto& c : bq.a) out.q_prime.push_back(paillier::decrypt(sk, c));
  return out;
}

Rational csp_score(const EncTuple& ct, const CspQuery& q) {
  if (ct.coords.size() != q.q_prime.size()) throw DimensionMismatch("tuple and query dimensions differ");
  Rational acc = 0;
  for (std::size_t i = 0; i < q.q_prime.size(); ++i) acc += ct.coords[i] * q.q_prime[i];
  return acc;
}

std::vector<std::size_t> csp_knn(const std::vector<EncTuple>& edb, const CspQuery& q, std::size_t k,
                                 kernels::Exec exec, OpCounters* counters) {
  if (k == 0) throw InvalidParams("k must be at least 1");
  if (k > edb.size()) {
    throw KTooLarge("k = " + std::to_string(k) + " exceeds database size " + std::to_string(edb.size()));
  }
  std::vector<Vector> rows;
  rows.reserve(edb.size());
  for (const auto& t : edb) rows.push_back(t.coords);
  std::uint64_t macs = 0;
  auto scores = kernels::dot_each(rows, q.q_prime, exec, &macs);
  if (counters != nullptr) counters->knn_macs += macs;
  auto pos = kernels::select_k_smallest(scores, k);
  for (auto& p : pos) p = edb[p].index;
  return pos;
}

}  // namespace sknn::proposed
