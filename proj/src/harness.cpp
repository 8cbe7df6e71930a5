#include "sknn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include "sknn/errors.hpp"
#include "sknn/io.hpp"

namespace sknn::harness {

using nlohmann::json;

namespace {

json cipher_array(const std::vector<paillier::Ciphertext>& cs) {
  json out = json::array();
  for (const auto& c : cs) out.push_back(io::to_hex(c.value()));
  return out;
}

std::vector<paillier::Ciphertext> cipher_vector(const json& j) {
  std::vector<paillier::Ciphertext> out;
  for (const auto& x : j) out.emplace_back(parse_integer(x.get<std::string>()));
  return out;
}

// Synchronous in-process delivery: every actor turns one message into zero
// or more replies.
class Session {
 public:
  Session(MessageBus* bus, std::string id) : bus_(bus) { transcript_.session_id = std::move(id); }

  void post(std::string from, std::string to, MessageKind kind, json payload) {
    Message m{std::move(from), std::move(to), kind, std::move(payload), next_seq_++};
    if (bus_ != nullptr) bus_->observe(m);
    transcript_.messages.push_back(m);
    queue_.push_back(std::move(m));
  }

  bool pop(Message& out) {
    if (head_ == queue_.size()) return false;
    out = queue_[head_++];
    return true;
  }

  Transcript& transcript() { return transcript_; }

 private:
  MessageBus* bus_;
  Transcript transcript_;
  std::vector<Message> queue_;
  std::size_t head_ = 0;
  std::uint64_t next_seq_ = 1;
};

}  // namespace

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::QueryRequest:
      return "QueryRequest";
    case MessageKind::BlindedQuery:
      return "BlindedQuery";
    case MessageKind::Refusal:
      return "Refusal";
    case MessageKind::CspQuery:
      return "CspQuery";
    case MessageKind::KnnRequest:
      return "KnnRequest";
    case MessageKind::KnnResult:
      return "KnnResult";
  }
  return "?";
}

json Message::to_json() const {
  return {{"seq", seq}, {"sender", sender}, {"receiver", receiver}, {"kind", to_string(kind)}, {"payload", payload}};
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& m : messages) {
    json line = m.to_json();
    line["session"] = session_id;
    out += line.dump();
    out += '\n';
  }
  return out;
}

bool protocol_order_ok(const Transcript& t) {
  std::string kinds;
  std::uint64_t last = 0;
  for (const auto& m : t.messages) {
    if (m.seq <= last && !kinds.empty()) return false;
    last = m.seq;
    kinds += to_string(m.kind) + ";";
  }
  static const std::regex order("QueryRequest;(Refusal;|BlindedQuery;CspQuery;KnnRequest;KnnResult;)");
  return std::regex_match(kinds, order);
}

Transcript simulate_session(const proposed::OwnerKey& key, const std::vector<EncTuple>& edb, const IntVector& query,
                            std::size_t k, Admission policy, const paillier::Keypair& qu_keys, EphemeralSource& src,
                            const std::string& session_id, MessageBus* bus, OpCounters* counters,
                            kernels::Exec exec) {
  Session s(bus, session_id);
  const auto domain = proposed::public_domain(key);

  // QU opens the session.
  {
    QueryRequest req = proposed::qu_build_request(query, domain, qu_keys.pub, src.rng());
    s.post("QU", "DO", MessageKind::QueryRequest, {{"pk", io::to_json(req.pk)}, {"q_dot", cipher_array(req.q_dot)}});
  }

  std::optional<CspQuery> csp_query;  // CSP-side state
  Message m;
  while (s.pop(m)) {
    switch (m.kind) {
      case MessageKind::QueryRequest: {  // at DO
        QueryRequest req{cipher_vector(m.payload.at("q_dot")), io::paillier_public_from_json(m.payload.at("pk"))};
        auto outcome = proposed::do_blind_query(key, req, policy, src, exec, counters);
        if (auto* refusal = std::get_if<Refusal>(&outcome)) {
          s.post("DO", "QU", MessageKind::Refusal, {{"reason", refusal->reason}});
        } else {
          const auto& bl = std::get<proposed::Blinding>(outcome);
          s.post("DO", "QU", MessageKind::BlindedQuery, {{"a", cipher_array(bl.blinded.a)}});
        }
        break;
      }
      case MessageKind::BlindedQuery: {  // at QU
        CspQuery q = proposed::qu_unwrap(qu_keys.priv, BlindedQuery{cipher_vector(m.payload.at("a"))});
        s.post("QU", "CSP", MessageKind::CspQuery, {{"q_prime", io::to_json(q.q_prime)}});
        s.post("QU", "CSP", MessageKind::KnnRequest, {{"k", k}});
        break;
      }
      case MessageKind::CspQuery:  // at CSP
        csp_query = CspQuery{io::int_vector_from_json(m.payload.at("q_prime"))};
        break;
      case MessageKind::KnnRequest: {  // at CSP
        if (!csp_query) throw Error("k-NN request before the query");
        auto idx = proposed::csp_knn(edb, *csp_query, m.payload.at("k").get<std::size_t>(), exec, counters);
        s.post("CSP", "QU", MessageKind::KnnResult, {{"indices", idx}});
        break;
      }
      case MessageKind::KnnResult:  // at QU
        s.transcript().result = m.payload.at("indices").get<std::vector<std::size_t>>();
        break;
      case MessageKind::Refusal:  // at QU
        s.transcript().refused = true;
        break;
    }
  }
  return s.transcript();
}

std::vector<IntVector> ingest_csv(std::istream& in, const Integer& data_scale, std::size_t d) {
  if (data_scale <= 0) throw InvalidParams("data scale must be positive");
  std::vector<IntVector> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    IntVector row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        row.push_back(round_nearest(Rational(parse_rational(field) * data_scale)));
      } catch (const DomainError& e) {
        throw MalformedRow("line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (line.back() == ',') throw MalformedRow("line " + std::to_string(lineno) + ": trailing comma");
    if (d == 0) d = row.size();
    if (row.size() != d) {
      throw DimensionMismatch("line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                              " fields, expected " + std::to_string(d));
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<IntVector> ingest_csv(const std::string& path, const Integer& data_scale, std::size_t d) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return ingest_csv(in, data_scale, d);
}

std::string to_string(Scheme s) { return s == Scheme::proposed ? "proposed" : "baseline"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "proposed") return Scheme::proposed;
  if (s == "baseline") return Scheme::baseline;
  throw InvalidParams("unknown scheme '" + s + "'");
}

OpCounters count_ops(const RunDescriptor& run) {
  const std::uint64_t eta = run.eta();
  const std::uint64_t m = run.m;
  OpCounters c;
  c.keygen_entries = eta * eta;
  c.db_encrypt_macs = m * eta * eta;
  c.query_blind_macs = eta * eta;
  c.matrix_exps = eta * eta;
  c.slot_encodings = eta - run.d;
  c.query_powers = run.d;
  c.knn_macs = m * eta;
  return c;
}

namespace {

std::vector<IntVector> random_points(std::size_t m, std::size_t d, const Integer& bound, Rng& rng) {
  std::vector<IntVector> out(m, IntVector(d));
  for (auto& p : out) {
    for (auto& x : p) x = rng.uniform(Integer(0), bound);
  }
  return out;
}

template <class F>
std::uint64_t time_ns(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
}

}  // namespace

void bench(const BenchConfig& cfg, std::ostream& out) {
  out << kBenchHeader << '\n';
  if (cfg.repetitions == 0) return;
  Rng rng(cfg.seed);
  const paillier::Keypair qu = paillier::keygen(cfg.paillier_bits, rng);
  const Integer bound = 1000;

  auto row = [&](const char* phase, Scheme scheme, std::size_t d, std::size_t m, std::uint64_t ns,
                 std::uint64_t macs, std::uint64_t pops) {
    out << phase << ',' << to_string(scheme) << ',' << d << ',' << m << ',' << cfg.k << ',' << ns << ',' << macs
        << ',' << pops << '\n';
  };

  for (Scheme scheme : cfg.schemes) {
    for (std::size_t d : cfg.dims) {
      for (std::size_t m : cfg.sizes) {
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
          auto db = random_points(m, d, bound, rng);
          IntVector q = random_points(1, d, bound, rng).front();
          const std::size_t k = std::min(cfg.k, m);
          OpCounters ops;
          std::uint64_t ns = 0;
          if (scheme == Scheme::proposed) {
            proposed::SecurityParams p;
            p.d = d;
            p.c = std::min<std::size_t>(5, d);
            p.epsilon = 10;
            p.data_scale = 1;
            proposed::OwnerKey key;
            ns = time_ns([&] { key = proposed::keygen(p, bound, rng); });
            row("keygen", scheme, d, m, ns, p.eta() * p.eta(), 0);

            SeededSource src(rng);
            std::vector<EncTuple> edb;
            ns = time_ns([&] { edb = proposed::encrypt_database(key, db, src, cfg.exec, &ops); });
            row("db-encrypt", scheme, d, m, ns, ops.db_encrypt_macs, 0);

            auto req = proposed::qu_build_request(q, proposed::public_domain(key), qu.pub, rng);
            proposed::Blinding bl;
            ns = time_ns([&] {
              bl = std::get<proposed::Blinding>(proposed::do_blind_query(key, req, Admission::allow, src, cfg.exec, &ops));
            });
            row("query-blind", scheme, d, m, ns, ops.query_blind_macs, ops.paillier_ops());

            CspQuery cq = proposed::qu_unwrap(qu.priv, bl.blinded);
            ns = time_ns([&] { proposed::csp_knn(edb, cq, k, cfg.exec, &ops); });
            row("knn", scheme, d, m, ns, ops.knn_macs, 0);
          } else {
            baseline::BaselineParams p{d, 5, 5, baseline::Mode::real};
            baseline::BaselineKey key;
            ns = time_ns([&] { key = baseline::keygen(p, bound, rng); });
            row("keygen", scheme, d, m, ns, p.eta() * p.eta(), 0);

            std::vector<EncTuple> edb;
            ns = time_ns([&] { edb = baseline::encrypt_database(key, db, rng, cfg.exec, &ops); });
            row("db-encrypt", scheme, d, m, ns, ops.db_encrypt_macs, 0);

            auto req = baseline::build_request(q, qu.pub, rng);
            BlindedQuery bq;
            ns = time_ns([&] { bq = baseline::blind_query(key, req, rng, cfg.exec, &ops); });
            row("query-blind", scheme, d, m, ns, ops.query_blind_macs, ops.paillier_ops());

            CspQuery cq = proposed::qu_unwrap(qu.priv, bq);
            ns = time_ns([&] { baseline::knn(edb, cq, k, cfg.exec, &ops); });
            row("knn", scheme, d, m, ns, ops.knn_macs, 0);
          }
        }
      }
    }
  }
}

BaselineInstance make_baseline_instance(const baseline::BaselineParams& params, std::size_t m,
                                        const Integer& coord_bound, unsigned paillier_bits, Rng& rng) {
  BaselineInstance inst{baseline::keygen(params, coord_bound, rng), {}, {}, {}};
  inst.db = random_points(m, params.d, coord_bound, rng);
  inst.edb = baseline::encrypt_database(inst.key, inst.db, rng);
  inst.qu = paillier::keygen(paillier_bits, rng);
  return inst;
}

ProposedInstance make_proposed_instance(const proposed::SecurityParams& params, std::size_t m,
                                        const Integer& coord_bound, unsigned paillier_bits, Rng& rng) {
  ProposedInstance inst{proposed::keygen(params, coord_bound, rng), {}, {}, {}};
  inst.db = random_points(m, params.d, coord_bound, rng);
  SeededSource src(rng);
  inst.edb = proposed::encrypt_database(inst.key, inst.db, src);
  inst.qu = paillier::keygen(paillier_bits, rng);
  return inst;
}

attacks::QueryOracle baseline_oracle(const BaselineInstance& inst, Rng& rng) {
  return [&inst, &rng](const IntVector& q) {
    auto req = baseline::build_request(q, inst.qu.pub, rng);
    auto bq = baseline::blind_query(inst.key, req, rng);
    return proposed::qu_unwrap(inst.qu.priv, bq).q_prime;
  };
}

attacks::QueryOracle proposed_oracle(const ProposedInstance& inst, Rng& rng) {
  return [&inst, &rng](const IntVector& q) {
    QueryRequest req;
    req.pk = inst.qu.pub;
    for (const auto& x : q) req.q_dot.push_back(paillier::encrypt(inst.qu.pub, x, rng));
    SeededSource src(rng);
    auto bl = proposed::blind_query_with(inst.key, req, proposed::draw_query_secrets(inst.key, src), rng);
    return proposed::qu_unwrap(inst.qu.priv, bl.blinded).q_prime;
  };
}

bool judge_columns(const std::vector<IntVector>& columns, const baseline::BaselineKey& key) {
  if (columns.size() != key.params.d) return false;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != key.m_hat.rows()) return false;
    for (std::size_t i = 0; i < columns[j].size(); ++i) {
      if (Rational(columns[j][i]) != key.m_hat(i, j)) return false;
    }
  }
  return true;
}

bool judge_database(const std::vector<Vector>& recovered, const std::vector<IntVector>& truth) {
  if (recovered.size() != truth.size()) return false;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!judge_query(recovered[i], truth[i])) return false;
  }
  return true;
}

bool judge_query(const Vector& recovered, const IntVector& truth) {
  if (recovered.size() != truth.size()) return false;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (recovered[j] != Rational(truth[j])) return false;
  }
  return true;
}

std::size_t count_column_matches(const std::vector<IntVector>& candidates, const proposed::OwnerKey& key) {
  std::set<Vector> truth;
  for (std::size_t j = 0; j < key.m_hat.cols(); ++j) {
    Vector col = key.m_hat.column(j);
    truth.insert(col);
    for (auto& x : col) x *= key.params.matrix_scale;
    truth.insert(col);
  }
  std::size_t hits = 0;
  for (const auto& c : candidates) {
    if (truth.count(to_rationals(c)) != 0) ++hits;
  }
  return hits;
}

namespace {

json columns_json(const std::vector<IntVector>& cols) {
  json out = json::array();
  for (const auto& c : cols) out.push_back(io::to_json(c));
  return out;
}

}  // namespace

attacks::AttackReport run_level1(const BaselineInstance& inst, const Integer& n, Rng& rng) {
  attacks::AttackReport r;
  r.attack = "level1";
  auto oracle = baseline_oracle(inst, rng);
  auto res = attacks::level1_recover_columns(oracle, inst.key.params.d, n);
  r.trials = res.queries;
  r.recovered["columns"] = columns_json(res.columns);
  r.stats["queries"] = res.queries;
  r.stats["N"] = n.get_str();
  r.verdict = judge_columns(res.columns, inst.key);
  return r;
}

attacks::AttackReport run_level2(const BaselineInstance& inst, std::size_t known, const Integer& n, Rng& rng) {
  attacks::AttackReport r;
  r.attack = "level2";
  auto oracle = baseline_oracle(inst, rng);
  auto l1 = attacks::level1_recover_columns(oracle, inst.key.params.d, n);

  std::vector<std::size_t> rows(inst.db.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  rng.shuffle(rows.begin(), rows.end());
  std::vector<IntVector> known_pts;
  for (std::size_t i = 0; i < std::min(known, rows.size()); ++i) known_pts.push_back(inst.db[rows[i]]);

  const double t = static_cast<double>(inst.edb.size());
  r.predicted_collision_probability =
      attacks::collision_probability(t, 3.0, static_cast<double>(inst.key.params.d));
  r.stats["level1_queries"] = l1.queries;
  r.stats["known_plaintexts"] = known_pts.size();

  auto l2 = attacks::level2_recover_s(inst.edb, known_pts, l1.columns);
  auto db = attacks::recover_database(l2.s, l1.columns, inst.edb);
  r.trials = 1;
  r.recovered["s"] = io::to_json(l2.s);
  json rows_json = json::array();
  for (const auto& p : db) rows_json.push_back(io::to_json(p));
  r.recovered["database"] = rows_json;
  r.stats["table_size"] = l2.table_size;
  r.stats["intra_column_collisions"] = l2.intra_column_collisions;

  bool s_ok = true;
  for (std::size_t j = 0; j < l2.s.size(); ++j) s_ok = s_ok && l2.s[j] == inst.key.s[j];
  r.stats["columns_match"] = judge_columns(l1.columns, inst.key);
  r.stats["s_match"] = s_ok;
  r.verdict = s_ok && judge_database(db, inst.db);
  return r;
}

attacks::AttackReport run_query_recovery(const BaselineInstance& inst, const IntVector& query, Rng& rng) {
  attacks::AttackReport r;
  r.attack = "query-recovery";
  const std::size_t d = inst.key.params.d;
  if (inst.db.size() < d + 2) throw InvalidParams("query recovery needs at least d + 2 tuples");
  IntVector q_prime = baseline_oracle(inst, rng)(query);

  std::vector<attacks::KnownPair> pairs;
  for (std::size_t i = 0; i < d + 2; ++i) pairs.push_back({to_rationals(inst.db[i]), inst.edb[i].coords});

  Integer beta = attacks::recover_beta(q_prime, q_prime.size());
  Vector y(q_prime.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = Rational(q_prime[i] / beta);
  std::vector<attacks::KnownPair> first(pairs.begin(), pairs.begin() + static_cast<long>(d + 1));
  auto rec = attacks::recover_query(y, first);
  bool integral = std::all_of(rec.q.begin(), rec.q.end(), [](const Rational& x) { return is_integer(x); });
  r.stats["beta_from_gcd"] = beta.get_str();
  r.stats["unscaled_fallback"] = !integral;
  if (!integral) rec = attacks::recover_query_unscaled(q_prime, pairs);
  r.trials = 1;
  r.recovered["query"] = io::to_json(rec.q);
  r.stats["singular_selections"] = rec.singular_selections;
  r.verdict = judge_query(rec.q, query);
  return r;
}

attacks::AttackReport run_resistance(const ProposedInstance& inst, attacks::ProbeCase which, std::size_t trials,
                                     const Integer& n, Rng& rng) {
  attacks::AttackReport r;
  r.attack = "resistance/" + attacks::to_string(which);
  auto res = attacks::probe_proposed_resistance(proposed_oracle(inst, rng), which, inst.key.params.d, trials, n);
  const std::size_t matches = count_column_matches(res.candidates, inst.key);
  r.trials = trials;
  r.recovered["candidates"] = columns_json(res.candidates);
  r.stats["N"] = n.get_str();
  r.stats["column_matches"] = matches;
  r.stats["distinct_candidates"] = res.distinct_candidates;
  r.stats["distinct_responses"] = res.distinct_responses;
  r.verdict = matches > 0;
  return r;
}

}  // namespace sknn::harness
