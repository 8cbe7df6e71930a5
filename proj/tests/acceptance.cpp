// Acceptance checks, one line per criterion:  ACn PASS|FAIL  details
// Usage: acceptance [AC1 ... AC9]   (no arguments runs all of them)

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sknn/attacks.hpp"
#include "sknn/baseline.hpp"
#include "sknn/errors.hpp"
#include "sknn/harness.hpp"
#include "sknn/proposed.hpp"
#include "sknn/toy.hpp"

using namespace sknn;
namespace pr = sknn::proposed;
namespace bl = sknn::baseline;
namespace hn = sknn::harness;
namespace at = sknn::attacks;

namespace {

constexpr double kTol = 1e-3;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "first failure: " << what << "; ";
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(const Rational& got, const std::string& want, double tol) {
  return std::fabs(Rational(got - parse_rational(want)).get_d()) <= tol;
}

pr::SecurityParams proposed_params(std::size_t d, std::size_t c, std::size_t eps, const Integer& query_scale = 100) {
  pr::SecurityParams p;
  p.d = d;
  p.c = c;
  p.epsilon = eps;
  p.data_scale = 1;
  p.query_scale = query_scale;
  return p;
}

// ------------------------------------------------------------------ AC1
void ac1(Outcome& o) {
  auto t0 = Clock::now();
  auto r = fixture::run_toy();
  const char* p_want[2][10] = {
      {"-2.450", "4.596", "-20.674", "-4.666", "1.680", "-14.833", "16.390", "-10.106", "30.685", "11.411"},
      {"-21.880", "-19.894", "-24.697", "15.103", "-9.657", "-24.043", "4.931", "-7.558", "44.538", "54.709"}};
  const IntVector q_want{1575584, 1782952, 1228800, 2905368, 3427432, 4446252, 2539928, 1537316, 2340052, 2188120};

  o.require(r.tuple_secrets[0].tau[r.key.last_zero()] == Rational(-169, 4), "nom_p != -42.25");
  o.require(paillier::decrypt(r.qu.priv, r.blinding.r_enc[r.key.last_one()]) == 14404, "nom_q != 14404");
  double worst = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      double err = std::fabs(Rational(r.edb[i].coords[j] - parse_rational(p_want[i][j])).get_d());
      worst = std::max(worst, err);
    }
  }
  o.require(worst <= kTol, "p' coordinate off by more than 1e-3");
  o.require(r.q.q_prime == q_want, "q' differs");
  Rational s1 = pr::csp_score(pr::quantize_tuple(r.edb[0], 6), r.q);
  Rational s2 = pr::csp_score(pr::quantize_tuple(r.edb[1], 6), r.q);
  o.require(within(s1, "28048002.560", kTol), "score1 = " + to_fixed(s1, 3));
  o.require(within(s2, "28424001.890", kTol), "score2 = " + to_fixed(s2, 3));
  auto nn = pr::csp_knn(r.edb, r.q, 1);
  o.require(nn == std::vector<std::size_t>{0}, "1-NN is not index 0");
  double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime over 5 s");
  o.detail << "max |p' err| " << worst << ", scores " << to_fixed(s1, 3) << " / " << to_fixed(s2, 3) << " (exact "
           << to_exact_string(pr::csp_score(r.edb[0], r.q)) << " / " << to_exact_string(pr::csp_score(r.edb[1], r.q))
           << "), 1-NN " << nn.front() << ", " << std::setprecision(3) << secs << " s";
}

// ------------------------------------------------------------------ AC2
void ac2(Outcome& o) {
  auto t0 = Clock::now();
  const auto& qu = fixture::qu_keys_256();
  Rng rng(1002);
  std::size_t ok_p = 0, ok_b = 0, tie_explained = 0;
  constexpr int kInstances = 200;
  for (int i = 0; i < kInstances; ++i) {
    const std::size_t d = rng.uniform(2, 8);
    const std::size_t m = rng.uniform(5, 50);
    const std::size_t k = rng.uniform(1, 5);
    auto db = fixture::random_points(m, d, 100, rng);
    IntVector q = fixture::random_points(1, d, 100, rng)[0];
    auto want = oracle::knn(db, q, k);

    // proposed
    auto key = pr::keygen(proposed_params(d, rng.uniform(2, d), rng.uniform(2, 5)), 100, rng);
    SeededSource src(rng);
    auto edb = pr::encrypt_database(key, db, src);
    auto req = pr::qu_build_request(q, pr::public_domain(key), qu.pub, rng);
    auto blinded = std::get<pr::Blinding>(pr::do_blind_query(key, req, Admission::allow, src));
    auto got = pr::csp_knn(edb, pr::qu_unwrap(qu.priv, blinded.blinded), k);
    if (got == want) {
      ++ok_p;
    } else {
      bool same_dists = true;
      for (std::size_t j = 0; j < k; ++j) same_dists = same_dists && oracle::dist2(db[got[j]], q) == oracle::dist2(db[want[j]], q);
      if (same_dists) ++tie_explained;
    }

    // baseline
    bl::BaselineParams bp{d, rng.uniform(1, 3), rng.uniform(1, 3), i % 2 ? bl::Mode::real : bl::Mode::integerized};
    auto bkey = bl::keygen(bp, 100, rng);
    auto bedb = bl::encrypt_database(bkey, db, rng);
    auto bq = bl::blind_query(bkey, bl::build_request(q, qu.pub, rng), rng);
    if (bl::knn(bedb, pr::qu_unwrap(qu.priv, bq), k) == want) ++ok_b;
  }
  double secs = seconds_since(t0);
  o.require(ok_p == kInstances, "proposed k-NN differs from brute force");
  o.require(ok_b == kInstances, "baseline k-NN differs from brute force");
  o.require(secs < 120.0, "runtime over 2 min");
  o.detail << "proposed " << ok_p << "/" << kInstances << " (mismatches with equal distances: " << tie_explained
           << "), baseline " << ok_b << "/" << kInstances << ", " << std::setprecision(3) << secs << " s";
}

// ------------------------------------------------------------------ AC3
Rational dot_w(const Vector& v, const IntVector& w) {
  Rational acc = 0;
  for (std::size_t j = 0; j < w.size(); ++j) acc += v[j] * w[j];
  return acc;
}

void ac3(Outcome& o) {
  const auto& qu = fixture::qu_keys_256();
  Rng rng(1003);
  std::size_t checks = 0;
  auto one_instance = [&](bool unit) {
    const std::size_t d = rng.uniform(2, 8);
    auto key = pr::keygen(proposed_params(d, rng.uniform(2, d), rng.uniform(2, 6), unit ? 1 : 100), 100, rng);
    if (unit) {
      // unit scaling: S = 1 and w_L = 1 make the uniform multiplier 1
      auto w = key.w;
      w[key.last_one()] = 1;
      key = pr::OwnerKey::assemble(key.params, key.m, key.pi, key.s, key.sigma, key.b, w, key.bound);
    }
    SeededSource src(rng);
    std::vector<Vector> taus;
    for (int t = 0; t < 6; ++t) {
      auto sec = pr::gen_tau(key, src);
      o.require(dot_w(sec.tau, key.w) == 0, "w . tau != 0");
      taus.push_back(sec.tau);
    }
    IntVector q = fixture::random_points(1, d, 100, rng)[0];
    auto req = pr::qu_build_request(q, pr::public_domain(key), qu.pub, rng);
    auto b = std::get<pr::Blinding>(pr::do_blind_query(key, req, Admission::allow, src));
    Vector r_dec;
    for (const auto& c : b.r_enc) r_dec.emplace_back(paillier::decrypt(qu.priv, c));
    o.require(dot_w(r_dec, key.w) == 0, "decrypt(r_enc) . w != 0");
    for (std::size_t i = 0; i < taus.size(); ++i) {
      for (std::size_t j = i + 1; j < taus.size(); ++j) {
        Vector diff(taus[i].size());
        for (std::size_t s = 0; s < diff.size(); ++s) diff[s] = taus[i][s] - taus[j][s];
        o.require(dot(diff, r_dec) == 0, "(tau_i - tau_j) . r_dec != 0");
      }
    }
    Rational norm = 0;
    for (const auto& w : key.w) norm += w * w;
    Rational cross = dot(taus[0], r_dec);
    if (unit) {
      o.require(b.secrets.multiplier == 1, "multiplier != 1 at unit scaling");
      o.require(cross == norm, "tau . r_dec != |w|^2 at unit scaling");
    } else {
      o.require(cross == b.secrets.multiplier * key.params.query_scale * norm, "tau . r_dec != D S |w|^2");
    }
    ++checks;
  };
  for (int i = 0; i < 100; ++i) one_instance(true);
  for (int i = 0; i < 100; ++i) one_instance(false);
  o.detail << checks << " keys/queries (100 at unit scaling, 100 at S = 100), 6 tuples each";
}

// ------------------------------------------------------------------ AC4
void ac4(Outcome& o) {
  const auto& qu = fixture::qu_keys_256();
  Rng rng(1004);
  std::size_t agree = 0, total = 0, adjacent = 0;
  for (int k = 0; k < 10; ++k) {
    const std::size_t d = rng.uniform(2, 8);
    auto key = pr::keygen(proposed_params(d, rng.uniform(2, d), rng.uniform(2, 6)), 100, rng);
    SeededSource src(rng);
    for (int t = 0; t < 100; ++t) {
      IntVector q, pi, pj;
      Integer gap;
      do {
        q = fixture::random_points(1, d, 100, rng)[0];
        pi = fixture::random_points(1, d, 100, rng)[0];
        pj = fixture::random_points(1, d, 100, rng)[0];
        if (t % 3 == 0) {
          // distances one apart: p_j = p_i + e_0 with (p_i - q)_0 in {0, -1}
          pi[0] = q[0] > 0 && rng.coin() ? q[0] - 1 : q[0];
          if (pi[0] == 100) pi[0] = 99, q[0] = pi[0];
          pj = pi;
          pj[0] += 1;
        }
        gap = oracle::dist2(pi, q) - oracle::dist2(pj, q);
      } while (gap == 0);
      if (abs(gap) == 1) ++adjacent;
      auto ei = pr::encrypt_tuple(key, pi, src, 0);
      auto ej = pr::encrypt_tuple(key, pj, src, 1);
      auto req = pr::qu_build_request(q, pr::public_domain(key), qu.pub, rng);
      auto b = std::get<pr::Blinding>(pr::do_blind_query(key, req, Admission::allow, src));
      o.require(b.secrets.beta2_units > b.secrets.beta1_units * key.sigma_sq_sum(), "beta2 <= beta1 sum sigma^2");
      auto csp = pr::qu_unwrap(qu.priv, b.blinded);
      Rational diff = pr::csp_score(ei, csp) - pr::csp_score(ej, csp);
      if (oracle::sign(diff) == oracle::sign(gap)) ++agree;
      ++total;
    }
  }
  o.require(agree == total, "score order differs from distance order");
  o.detail << agree << "/" << total << " triples agree (" << adjacent << " with |gap| = 1)";
}

// ------------------------------------------------------------------ AC5
void ac5(Outcome& o) {
  auto t0 = Clock::now();
  Rng rng(1005);
  std::size_t db_ok = 0, q_ok = 0, fallback = 0;
  for (int i = 0; i < 20; ++i) {
    bl::BaselineParams p{static_cast<std::size_t>(rng.uniform(3, 6)), 2, 2, bl::Mode::integerized};
    auto inst = hn::make_baseline_instance(p, 10, 1000, 256, rng);
    try {
      auto r2 = hn::run_level2(inst, 2, at::default_level1_n(p), rng);
      if (r2.verdict.value_or(false)) ++db_ok;
    } catch (const AttackInconclusive&) {
    }
    IntVector q = fixture::random_points(1, p.d, 1000, rng)[0];
    try {
      auto rq = hn::run_query_recovery(inst, q, rng);
      if (rq.verdict.value_or(false)) ++q_ok;
      if (rq.stats["unscaled_fallback"].get<bool>()) ++fallback;
    } catch (const AttackInconclusive&) {
    }
  }
  double secs = seconds_since(t0);
  o.require(db_ok == 20, "database not recovered in every run");
  o.require(q_ok == 20, "query not recovered in every run");
  o.require(secs < 60.0, "runtime over 1 min");
  o.detail << "database " << db_ok << "/20, query " << q_ok << "/20 (" << fallback << " via the unscaled system), "
           << std::setprecision(3) << secs << " s";
}

// ------------------------------------------------------------------ AC6
void ac6(Outcome& o) {
  Rng rng(1006);
  auto params = proposed_params(4, 2, 2);
  auto inst = hn::make_proposed_instance(params, 10, 100, 256, rng);
  bl::BaselineParams same{4, 2, 2, bl::Mode::integerized};
  auto rep = hn::run_resistance(inst, at::ProbeCase::scaled_unit_query, 20, at::default_level1_n(same), rng);
  auto matches = rep.stats["column_matches"].get<std::size_t>();
  auto distinct = rep.stats["distinct_candidates"].get<std::size_t>();
  o.require(matches == 0, "a candidate matched a key column");
  o.require(distinct == 20, "candidates repeat");

  // residuals against known alphas
  const auto& qu = fixture::qu_keys_256();
  std::size_t pairs = 0, nonzero = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto key = pr::keygen(proposed_params(3, 2, 3), 100, rng);
    SeededSource src(rng);
    auto db = fixture::random_points(6, 3, 100, rng);
    std::vector<EncTuple> edb;
    std::vector<Rational> alpha;
    for (std::size_t i = 0; i < db.size(); ++i) {
      auto sec = pr::gen_tau(key, src);
      alpha.push_back(sec.alpha);
      edb.push_back(pr::encrypt_tuple_with(key, db[i], sec, i));
    }
    IntVector q = fixture::random_points(1, 3, 100, rng)[0];
    auto b = std::get<pr::Blinding>(
        pr::do_blind_query(key, pr::qu_build_request(q, pr::public_domain(key), qu.pub, rng), Admission::allow, src));
    auto csp = pr::qu_unwrap(qu.priv, b.blinded);
    at::ResidualTruth truth{db, q, b.secrets.beta2_units, key.params.matrix_scale};
    for (std::size_t i = 0; i < db.size(); ++i) {
      for (std::size_t j = i + 1; j < db.size(); ++j) {
        if (alpha[i] == alpha[j]) continue;
        ++pairs;
        Rational res = at::residual_check(edb, csp, {i, j}, truth);
        if (res != 0) ++nonzero;
        o.require(res == b.secrets.beta1_units * (alpha[i] - alpha[j]), "residual != beta1 (alpha_i - alpha_j)");
      }
    }
  }
  o.require(nonzero == pairs, "zero residual with distinct alphas");
  auto toy = fixture::run_toy();
  at::ResidualTruth tt{toy::database(), toy::query(), toy.blinding.secrets.beta2_units, toy.key.params.matrix_scale};
  Rational toy_res = at::residual_check(toy.edb, toy.q, {0, 1}, tt);
  o.require(toy_res == -20000, "worked-example residual != -20000");
  o.detail << matches << "/20 column matches, " << distinct << " distinct candidates, residual nonzero in " << nonzero
           << "/" << pairs << " pairs, worked example " << to_exact_string(toy_res);
}

// ------------------------------------------------------------------ AC7
void ac7(Outcome& o) {
  Rng rng(1007);
  auto kp = paillier::keygen(256, rng);
  auto rnd = [&](unsigned bits) {
    Integer x = rng.random_bits(bits);
    return rng.coin() ? Integer(-x) : x;
  };
  std::size_t a = 0, b = 0, round = 0, prob = 0;
  for (int i = 0; i < 100; ++i) {
    Integer m1 = rnd(200), m2 = rnd(200);
    auto c = paillier::hom_add(kp.pub, paillier::encrypt(kp.pub, m1, rng), paillier::encrypt(kp.pub, m2, rng));
    if (paillier::decrypt(kp.priv, c) == m1 + m2) ++a;
  }
  for (int i = 0; i < 100; ++i) {
    Integer m = rnd(120), k = rnd(120);
    if (paillier::decrypt(kp.priv, paillier::hom_scale(kp.pub, paillier::encrypt(kp.pub, m, rng), k)) == m * k) ++b;
  }
  for (int i = 0; i < 100; ++i) {
    Integer m = rnd(250);
    if (paillier::decrypt(kp.priv, paillier::encrypt(kp.pub, m, rng)) == m) ++round;
  }
  for (int i = 0; i < 100; ++i) {
    Integer m = rnd(64);
    if (!(paillier::encrypt(kp.pub, m, rng) == paillier::encrypt(kp.pub, m, rng))) ++prob;
  }
  o.require(a == 100 && b == 100 && round == 100 && prob == 100, "a Paillier property failed");
  o.detail << "add " << a << "/100, scale " << b << "/100, signed round trip " << round << "/100, distinct ciphertexts "
           << prob << "/100";
}

// ------------------------------------------------------------------ AC8
void ac8(Outcome& o) {
  Rng rng(1008);
  const auto& qu = fixture::qu_keys_256();
  struct Setting {
    std::size_t d, c, eps, m;
  };
  std::ostringstream info;
  for (Setting s : {Setting{3, 2, 2, 10}, Setting{5, 3, 4, 20}, Setting{8, 4, 6, 7}}) {
    auto key = pr::keygen(proposed_params(s.d, s.c, s.eps), 100, rng);
    const std::uint64_t eta = key.params.eta();
    OpCounters prev;
    for (std::size_t m : {s.m, 2 * s.m}) {
      auto db = fixture::random_points(m, s.d, 100, rng);
      SeededSource src(rng);
      OpCounters c;
      auto edb = pr::encrypt_database(key, db, src, kernels::Exec::parallel, &c);
      auto req = pr::qu_build_request(db[0], pr::public_domain(key), qu.pub, rng);
      auto b = std::get<pr::Blinding>(pr::do_blind_query(key, req, Admission::allow, src));
      pr::csp_knn(edb, pr::qu_unwrap(qu.priv, b.blinded), 1, kernels::Exec::parallel, &c);
      o.require(c.db_encrypt_macs == m * eta * eta, "db-encrypt MACs != m eta^2");
      o.require(c.knn_macs == m * eta, "knn MACs != m eta");
      if (m == 2 * s.m) {
        o.require(c.db_encrypt_macs == 2 * prev.db_encrypt_macs && c.knn_macs == 2 * prev.knn_macs,
                  "doubling m did not double the counts");
      }
      prev = c;
    }
    info << "(m=" << s.m << ", eta=" << eta << ") ";
  }
  o.detail << "settings " << info.str() << "and 2m each";
}

// ------------------------------------------------------------------ AC9
void ac9(Outcome& o) {
  double p = at::collision_probability(1e6, 3, 20);
  std::ostringstream shown;
  shown << p;
  o.require(p == 0.0 && shown.str() == "0", "t=1e6, w=3, d=20 does not print 0");
  o.require(p == 1.0 - std::exp(-4.0 * 1e12 / 1e60), "formula mismatch at t=1e6");

  Rng rng(1009);
  std::size_t reports = 0;
  for (std::size_t d : {3u, 4u}) {
    bl::BaselineParams bp{d, 2, 2, bl::Mode::integerized};
    auto inst = hn::make_baseline_instance(bp, 10, 1000, 256, rng);
    auto rep = hn::run_level2(inst, 2, at::default_level1_n(bp), rng);
    double want = 1.0 - std::exp(-4.0 * 10.0 * 10.0 / std::pow(10.0, 3.0 * static_cast<double>(d)));
    o.require(rep.predicted_collision_probability.has_value() && *rep.predicted_collision_probability == want,
              "report probability differs from the formula");
    o.require(rep.to_json().contains("predicted_collision_probability"), "report JSON lacks the probability");
    ++reports;
  }
  o.detail << "P(1e6, 3, 20) prints " << shown.str() << ", " << reports << " reports match 1 - exp(-4t^2/10^(wd))";
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<void(Outcome&)>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) wanted.emplace_back(argv[i]);
  if (wanted.empty()) {
    for (const auto& [name, fn] : criteria) wanted.push_back(name);
  }
  int failures = 0;
  for (const auto& name : wanted) {
    auto it = criteria.find(name);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << name << '\n';
      return 2;
    }
    Outcome o;
    try {
      it->second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str() << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
