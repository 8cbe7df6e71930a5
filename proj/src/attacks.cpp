#include "sknn/attacks.hpp"

#include <cmath>
#include <numeric>

#include "sknn/errors.hpp"
#include "sknn/matrix.hpp"

namespace sknn::attacks {

namespace {

// Advances `idx` (sorted, values < n) to the next k-combination.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

Integer gcd_of(std::span<const Integer> v, const std::vector<std::size_t>& idx) {
  Integer g = 0;
  for (auto i : idx) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v[i].get_mpz_t());
  return g;
}

std::string fingerprint(const Vector& v, unsigned digits) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += to_fixed(v[i], digits);
  }
  return out;
}

Vector solve(const Matrix& a, const Vector& rhs) { return mat_vec_mul(invert(a), rhs); }

Rational dot_int(std::span<const Rational> u, std::span<const Integer> v) {
  Rational acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

}  // namespace

Integer recover_beta(std::span<const Integer> q_prime, std::size_t subset_size) {
  if (subset_size == 0 || subset_size > q_prime.size()) throw InvalidParams("subset size out of range");
  if (subset_size == q_prime.size()) {
    Integer g = gcd_of(q_prime, first_combination(q_prime.size()));
    if (g == 0) throw AmbiguousBeta("q' is all zero");
    return g;
  }
  std::map<Integer, std::size_t> freq;
  auto idx = first_combination(subset_size);
  do {
    Integer g = gcd_of(q_prime, idx);
    if (g > 1) ++freq[g];
  } while (next_combination(idx, q_prime.size()));
  if (freq.empty()) throw AmbiguousBeta("every subset gcd is 1");
  std::size_t best = 0;
  Integer arg;
  bool tie = false;
  for (const auto& [g, n] : freq) {
    if (n > best) {
      best = n;
      arg = g;
      tie = false;
    } else if (n == best) {
      tie = true;
    }
  }
  if (tie) throw AmbiguousBeta("subset gcds disagree");
  return arg;
}

Integer default_level1_n(const baseline::BaselineParams& params) {
  return (Integer(1) << 32) * baseline::residual_bound(params);
}

IntVector level1_recover_column(const QueryOracle& oracle, std::size_t j, std::size_t d, const Integer& n) {
  if (j >= d) throw InvalidParams("column index out of range");
  if (n <= 0) throw InvalidParams("N must be positive");
  IntVector q(d, Integer(0));
  q[j] = n;
  IntVector q_prime = oracle(q);
  Integer beta = recover_beta(q_prime, q_prime.size());
  IntVector col(q_prime.size());
  for (std::size_t i = 0; i < q_prime.size(); ++i) col[i] = floor_div(Integer(q_prime[i] / beta), n);
  return col;
}

Level1Result level1_recover_columns(const QueryOracle& oracle, std::size_t d, const Integer& n,
                                    std::size_t max_queries_per_column) {
  Level1Result out;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<IntVector> seen;
    bool done = false;
    for (std::size_t attempt = 0; attempt < max_queries_per_column && !done; ++attempt) {
      IntVector col = level1_recover_column(oracle, j, d, n);
      ++out.queries;
      for (const auto& s : seen) {
        if (s == col) {
          out.columns.push_back(col);
          done = true;
          break;
        }
      }
      seen.push_back(std::move(col));
    }
    if (!done) throw AmbiguousBeta("column " + std::to_string(j) + " never recovered consistently");
  }
  return out;
}

void CollisionTable::add(const std::string& fp, const Vector& candidate, std::size_t column, std::size_t row) {
  hits_[fp].emplace(column, row);
  candidates_.emplace(fp, candidate);
}

std::vector<std::string> CollisionTable::in_all_columns(std::size_t columns) const {
  std::vector<std::string> out;
  for (const auto& [fp, hits] : hits_) {
    std::set<std::size_t> cols;
    for (const auto& h : hits) cols.insert(h.first);
    if (cols.size() == columns) out.push_back(fp);
  }
  return out;
}

std::size_t CollisionTable::intra_column_collisions() const {
  std::size_t n = 0;
  for (const auto& [fp, hits] : hits_) {
    std::set<std::size_t> cols;
    for (const auto& h : hits) cols.insert(h.first);
    n += hits.size() - cols.size();
  }
  return n;
}

Level2Result level2_recover_s(const std::vector<EncTuple>& edb, const std::vector<IntVector>& known,
                              const std::vector<IntVector>& columns, unsigned digits) {
  const std::size_t d = columns.size();
  CollisionTable table;
  for (std::size_t u = 0; u < known.size(); ++u) {
    if (known[u].size() != d) throw DimensionMismatch("known plaintext has the wrong dimension");
    for (std::size_t i = 0; i < edb.size(); ++i) {
      Vector cand(d);
      for (std::size_t j = 0; j < d; ++j) cand[j] = 2 * known[u][j] + dot_int(edb[i].coords, columns[j]);
      table.add(fingerprint(cand, digits), cand, u, i);
    }
  }
  if (known.size() < 2) {
    throw NoUniqueCandidate("need at least two known plaintexts for cross-column confirmation", table.size());
  }
  auto hits = table.in_all_columns(known.size());
  if (hits.size() != 1) {
    throw NoUniqueCandidate(std::to_string(hits.size()) + " candidates appear in every column", hits.size());
  }
  Level2Result out;
  out.s = table.candidate(hits.front());
  out.table_size = table.size();
  out.intra_column_collisions = table.intra_column_collisions();
  return out;
}

std::vector<Vector> recover_database(const Vector& s, const std::vector<IntVector>& columns,
                                     const std::vector<EncTuple>& edb) {
  const std::size_t d = columns.size();
  if (s.size() < d) throw DimensionMismatch("s is shorter than the column set");
  std::vector<Vector> out;
  out.reserve(edb.size());
  for (const auto& t : edb) {
    Vector p(d);
    for (std::size_t j = 0; j < d; ++j) p[j] = (s[j] - dot_int(t.coords, columns[j])) / 2;
    out.push_back(std::move(p));
  }
  return out;
}

QueryRecovery recover_query(const Vector& y, const std::vector<KnownPair>& pairs, std::size_t max_selections) {
  if (pairs.empty()) throw InvalidParams("no plaintext/ciphertext pairs");
  const std::size_t d = pairs.front().p.size();
  if (pairs.size() < d + 1) throw InvalidParams("query recovery needs d + 1 pairs");
  QueryRecovery out;
  auto idx = first_combination(d + 1);
  std::size_t tried = 0;
  do {
    if (tried++ == max_selections) break;
    const auto& a = pairs[idx[0]];
    Matrix m(d, d);
    Vector rhs(d);
    for (std::size_t r = 0; r < d; ++r) {
      const auto& k = pairs[idx[r + 1]];
      for (std::size_t c = 0; c < d; ++c) m(r, c) = 2 * (a.p[c] - k.p[c]);
      Vector dp(y.size());
      for (std::size_t i = 0; i < y.size(); ++i) dp[i] = a.p_prime[i] - k.p_prime[i];
      rhs[r] = squared_norm(a.p) - squared_norm(k.p) - dot(dp, y);
    }
    if (determinant(m) == 0) {
      ++out.singular_selections;
      continue;
    }
    out.q = solve(m, rhs);
    return out;
  } while (next_combination(idx, pairs.size()));
  throw SingularAfterRetries("every pair selection gave a singular system (" +
                             std::to_string(out.singular_selections) + " tried)");
}

QueryRecovery recover_query_unscaled(const IntVector& q_prime, const std::vector<KnownPair>& pairs,
                                     std::size_t max_selections) {
  if (pairs.empty()) throw InvalidParams("no plaintext/ciphertext pairs");
  const std::size_t d = pairs.front().p.size();
  if (pairs.size() < d + 2) throw InvalidParams("query recovery with unknown beta needs d + 2 pairs");
  QueryRecovery out;
  auto idx = first_combination(d + 2);
  std::size_t tried = 0;
  do {
    if (tried++ == max_selections) break;
    const auto& a = pairs[idx[0]];
    Matrix m(d + 1, d + 1);
    Vector rhs(d + 1);
    for (std::size_t r = 0; r <= d; ++r) {
      const auto& k = pairs[idx[r + 1]];
      for (std::size_t c = 0; c < d; ++c) m(r, c) = 2 * (a.p[c] - k.p[c]);
      m(r, d) = squared_norm(k.p) - squared_norm(a.p);
      Vector dp(q_prime.size());
      for (std::size_t i = 0; i < q_prime.size(); ++i) dp[i] = a.p_prime[i] - k.p_prime[i];
      rhs[r] = -dot_int(dp, q_prime);
    }
    if (determinant(m) == 0) {
      ++out.singular_selections;
      continue;
    }
    Vector x = solve(m, rhs);
    if (x[d] == 0) {
      ++out.singular_selections;
      continue;
    }
    out.q.resize(d);
    for (std::size_t c = 0; c < d; ++c) out.q[c] = x[c] / x[d];
    return out;
  } while (next_combination(idx, pairs.size()));
  throw SingularAfterRetries("every pair selection gave a singular system (" +
                             std::to_string(out.singular_selections) + " tried)");
}

double collision_probability(double t, double w, double d) {
  return 1.0 - std::exp(-4.0 * t * t / std::pow(10.0, w * d));
}

std::string to_string(ProbeCase c) {
  switch (c) {
    case ProbeCase::zero_query:
      return "zero";
    case ProbeCase::unit_query:
      return "unit";
    case ProbeCase::scaled_unit_query:
      return "scaled-unit";
  }
  return "?";
}

ProbeCase parse_probe_case(const std::string& s) {
  if (s == "zero") return ProbeCase::zero_query;
  if (s == "unit") return ProbeCase::unit_query;
  if (s == "scaled-unit") return ProbeCase::scaled_unit_query;
  throw InvalidParams("unknown probe case '" + s + "' (zero, unit, scaled-unit)");
}

ProbeResult probe_proposed_resistance(const QueryOracle& oracle, ProbeCase which, std::size_t d, std::size_t trials,
                                      const Integer& n, std::size_t column) {
  if (column >= d) throw InvalidParams("column index out of range");
  if (n <= 0) throw InvalidParams("N must be positive");
  IntVector q(d, Integer(0));
  if (which == ProbeCase::unit_query) q[column] = 1;
  if (which == ProbeCase::scaled_unit_query) q[column] = n;

  ProbeResult out;
  for (std::size_t t = 0; t < trials; ++t) {
    IntVector resp = oracle(q);
    Integer beta = recover_beta(resp, resp.size());
    IntVector cand(resp.size());
    for (std::size_t i = 0; i < resp.size(); ++i) cand[i] = floor_div(Integer(resp[i] / beta), n);
    out.responses.push_back(std::move(resp));
    out.candidates.push_back(std::move(cand));
  }
  out.distinct_responses = std::set<IntVector>(out.responses.begin(), out.responses.end()).size();
  out.distinct_candidates = std::set<IntVector>(out.candidates.begin(), out.candidates.end()).size();
  return out;
}

Rational residual_check(const std::vector<EncTuple>& edb, const CspQuery& q, std::pair<std::size_t, std::size_t> pair,
                        const ResidualTruth& truth) {
  const auto [i, j] = pair;
  if (i >= edb.size() || j >= edb.size() || i >= truth.plaintexts.size() || j >= truth.plaintexts.size()) {
    throw InvalidParams("pair index out of range");
  }
  Rational lhs = dot_int(edb[i].coords, q.q_prime) - dot_int(edb[j].coords, q.q_prime);
  lhs /= truth.matrix_scale;
  auto dist2 = [&](const IntVector& p) {
    Integer acc = 0;
    for (std::size_t c = 0; c < p.size(); ++c) acc += (p[c] - truth.q[c]) * (p[c] - truth.q[c]);
    return acc;
  };
  Integer gap = dist2(truth.plaintexts[i]) - dist2(truth.plaintexts[j]);
  return lhs - Rational(truth.beta2_units * gap);
}

nlohmann::json AttackReport::to_json() const {
  nlohmann::json j;
  j["attack"] = attack;
  j["recovered"] = recovered;
  j["verdict"] = verdict ? nlohmann::json(*verdict ? "MATCH" : "NO-MATCH") : nlohmann::json(nullptr);
  j["trials"] = trials;
  j["stats"] = stats;
  if (predicted_collision_probability) j["predicted_collision_probability"] = *predicted_collision_probability;
  return j;
}

}  // namespace sknn::attacks
