#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sknn/errors.hpp"
#include "sknn/proposed.hpp"
#include "sknn/toy.hpp"

using namespace sknn;
namespace pr = sknn::proposed;

namespace {

pr::SecurityParams small_params(std::size_t d, std::size_t c, std::size_t eps) {
  pr::SecurityParams p;
  p.d = d;
  p.c = c;
  p.epsilon = eps;
  p.data_scale = 1;
  return p;
}

}  // namespace

TEST_SUITE("toy") {
  TEST_CASE("worked example: tuple encryption") {
    auto r = fixture::run_toy();
    CHECK(r.tuple_secrets[0].tau[r.key.last_zero()] == Rational(-169, 4));
    const char* p1[] = {"-2.450", "4.596", "-20.674", "-4.666", "1.680", "-14.833", "16.390", "-10.106", "30.685",
                        "11.411"};
    const char* p2[] = {"-21.880", "-19.894", "-24.697", "15.103", "-9.657", "-24.043", "4.931", "-7.558", "44.538",
                        "54.709"};
    for (std::size_t j = 0; j < 10; ++j) {
      CHECK(to_fixed(r.edb[0].coords[j], 3) == p1[j]);
      CHECK(to_fixed(r.edb[1].coords[j], 3) == p2[j]);
    }
  }

  TEST_CASE("worked example: blinded query") {
    auto r = fixture::run_toy();
    CHECK(paillier::decrypt(r.qu.priv, r.blinding.r_enc[r.key.last_one()]) == 14404);
    CHECK(r.blinding.secrets.multiplier == 1);
    IntVector want{1575584, 1782952, 1228800, 2905368, 3427432, 4446252, 2539928, 1537316, 2340052, 2188120};
    CHECK(r.q.q_prime == want);
  }

  TEST_CASE("worked example: scores and answer") {
    auto r = fixture::run_toy();
    CHECK(to_fixed(pr::csp_score(pr::quantize_tuple(r.edb[0], 6), r.q), 3) == "28048002.560");
    CHECK(to_fixed(pr::csp_score(pr::quantize_tuple(r.edb[1], 6), r.q), 3) == "28424001.890");
    CHECK(pr::csp_score(r.edb[0], r.q) == 28048000);
    CHECK(pr::csp_score(r.edb[1], r.q) == 28424000);
    CHECK(pr::csp_knn(r.edb, r.q, 1) == std::vector<std::size_t>{0});
  }

  TEST_CASE("worked example is independent of the Paillier seed") {
    auto a = fixture::run_toy(1);
    auto b = fixture::run_toy(77);
    CHECK(a.q == b.q);
    CHECK(a.edb == b.edb);
  }

  TEST_CASE("toy key decrypts its own tuples") {
    auto r = fixture::run_toy();
    auto db = toy::database();
    for (std::size_t i = 0; i < db.size(); ++i) CHECK(pr::decrypt_tuple(r.key, r.edb[i]) == to_rationals(db[i]));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(small_params(3, 1, 3).validate(), InvalidParams);
  CHECK_THROWS_AS(small_params(3, 4, 3).validate(), InvalidParams);
  CHECK_THROWS_AS(small_params(3, 2, 1).validate(), InvalidParams);
  CHECK(small_params(3, 2, 2).validate().empty());
  CHECK(small_params(3, 3, 2).validate().size() == 1);
  auto p = small_params(3, 2, 2);
  p.query_scale = 0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
}

TEST_CASE("generated keys are well formed") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto params = small_params(2 + trial % 5, 2, 2 + trial % 3);
    auto key = pr::keygen(params, 50, rng);
    const std::size_t eta = params.eta();
    CHECK(key.m.rows() == eta);
    CHECK(determinant(key.m) != 0);
    for (std::size_t j = 0; j < params.d; ++j) CHECK(key.sigma[j] > key.bound[j]);
    for (std::size_t j = 0; j < params.c; ++j) CHECK(key.b[j] == 1);
    std::set<int> extra(key.b.begin() + params.c, key.b.end());
    CHECK(extra == std::set<int>{0, 1});
    for (const auto& w : key.w) CHECK((w >= 1 && w <= 100));
    CHECK(oracle::rows_of(key.m_hat) == oracle::permuted_columns_by_inverse(oracle::rows_of(key.m), key.pi.indices()));
    CHECK(key.m_hat * key.m_hat_inv == Matrix::identity(eta));
  }
}

TEST_CASE("assemble rejects malformed components") {
  auto key = toy::owner_key();
  auto b = key.b;
  b[0] = 0;
  CHECK_THROWS_AS(pr::OwnerKey::assemble(key.params, key.m, key.pi, key.s, key.sigma, b, key.w, key.bound),
                  InvalidParams);
  Matrix singular(10, 10);
  CHECK_THROWS_AS(
      pr::OwnerKey::assemble(key.params, singular, key.pi, key.s, key.sigma, key.b, key.w, key.bound),
      SingularMatrix);
  CHECK_THROWS_AS(pr::OwnerKey::assemble(key.params, key.m, key.pi, Vector{1, 2}, key.sigma, key.b, key.w,
                                         key.bound),
                  DimensionMismatch);
}

TEST_CASE("tau is orthogonal to w and alpha stays positive") {
  Rng rng(12);
  SeededSource src(rng);
  for (auto form : {pr::AlphaForm::per_coordinate, pr::AlphaForm::scalar}) {
    auto params = small_params(4, 2, 4);
    params.alpha_form = form;
    auto key = pr::keygen(params, 20, rng);
    for (int i = 0; i < 50; ++i) {
      auto sec = pr::gen_tau(key, src);
      Rational dot = 0;
      for (std::size_t j = 0; j < key.w.size(); ++j) dot += sec.tau[j] * key.w[j];
      CHECK(dot == 0);
      CHECK(sec.alpha > 0);
      CHECK(sec.t.size() == (form == pr::AlphaForm::scalar ? 1u : params.d));
    }
  }
}

TEST_CASE("encrypt then decrypt returns the tuple") {
  Rng rng(13);
  SeededSource src(rng);
  auto key = pr::keygen(small_params(5, 3, 3), 1000, rng);
  auto db = fixture::random_points(30, 5, 1000, rng);
  auto edb = pr::encrypt_database(key, db, src);
  for (std::size_t i = 0; i < db.size(); ++i) {
    CHECK(edb[i].index == i);
    CHECK(pr::decrypt_tuple(key, edb[i]) == to_rationals(db[i]));
  }
  auto other = pr::keygen(small_params(5, 3, 3), 1000, rng);
  CHECK_FALSE(pr::decrypt_tuple(other, edb[0]) == to_rationals(db[0]));
}

TEST_CASE("out-of-bound coordinates are rejected") {
  Rng rng(14);
  SeededSource src(rng);
  auto key = pr::keygen(small_params(3, 2, 2), 10, rng);
  CHECK_THROWS_AS(pr::encrypt_tuple(key, IntVector{1, 11, 0}, src), CoordinateOutOfBound);
  CHECK_NOTHROW(pr::encrypt_tuple(key, IntVector{10, -10, 0}, src));
  CHECK_THROWS_AS(pr::encrypt_tuple(key, IntVector{1, 1}, src), DimensionMismatch);
  const auto& kp = fixture::qu_keys_256();
  CHECK_THROWS_AS(pr::qu_build_request(IntVector{0, 0, 11}, pr::public_domain(key), kp.pub, rng),
                  CoordinateOutOfBound);
}

TEST_CASE("serial and parallel database encryption agree") {
  Rng rng(15);
  auto key = pr::keygen(small_params(6, 2, 3), 100, rng);
  auto db = fixture::random_points(40, 6, 100, rng);
  Rng a(7), b(7);
  SeededSource sa(a), sb(b);
  OpCounters ca, cb;
  auto ea = pr::encrypt_database(key, db, sa, kernels::Exec::serial, &ca);
  auto eb = pr::encrypt_database(key, db, sb, kernels::Exec::parallel, &cb);
  CHECK(ea == eb);
  CHECK(ca == cb);
}

TEST_CASE("blinded query matches the plaintext evaluation") {
  Rng rng(16);
  const auto& qu = fixture::qu_keys_256();
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t d = 2 + trial % 6;
    std::size_t c = 2 + trial % (d - 1);
    auto key = pr::keygen(small_params(d, c, 2 + trial % 4), 100, rng);
    SeededSource src(rng);
    IntVector q = fixture::random_points(1, d, 100, rng)[0];
    auto req = pr::qu_build_request(q, pr::public_domain(key), qu.pub, rng);
    auto bl = std::get<pr::Blinding>(pr::do_blind_query(key, req, Admission::allow, src));

    Vector r_dec;
    for (const auto& ct : bl.r_enc) r_dec.emplace_back(paillier::decrypt(qu.priv, ct));
    CHECK(r_dec == oracle::expected_r_dec(key, bl.secrets, q));

    auto csp = pr::qu_unwrap(qu.priv, bl.blinded);
    CHECK(to_rationals(csp.q_prime) == oracle::expected_q_prime(key, bl.secrets, q));
    CHECK(bl.secrets.beta2_units > bl.secrets.beta1_units * key.sigma_sq_sum());
  }
}

TEST_CASE("k-NN agrees with brute force") {
  Rng rng(17);
  const auto& qu = fixture::qu_keys_256();
  for (int trial = 0; trial < 15; ++trial) {
    std::size_t d = 2 + trial % 4;
    auto key = pr::keygen(small_params(d, 2, 3), 50, rng);
    SeededSource src(rng);
    auto db = fixture::random_points(25, d, 50, rng);
    auto edb = pr::encrypt_database(key, db, src);
    IntVector q = fixture::random_points(1, d, 50, rng)[0];
    auto req = pr::qu_build_request(q, pr::public_domain(key), qu.pub, rng);
    auto bl = std::get<pr::Blinding>(pr::do_blind_query(key, req, Admission::allow, src));
    auto csp = pr::qu_unwrap(qu.priv, bl.blinded);
    std::size_t k = 1 + trial % 5;
    auto got = pr::csp_knn(edb, csp, k);
    auto want = oracle::knn(db, q, k);
    // equal distances may be broken differently by alpha; compare distances
    REQUIRE(got.size() == k);
    for (std::size_t i = 0; i < k; ++i) CHECK(oracle::dist2(db[got[i]], q) == oracle::dist2(db[want[i]], q));
  }
}

TEST_CASE("k out of range") {
  auto r = fixture::run_toy();
  CHECK_THROWS_AS(pr::csp_knn(r.edb, r.q, 0), InvalidParams);
  CHECK_THROWS_AS(pr::csp_knn(r.edb, r.q, 3), KTooLarge);
  CHECK(pr::csp_knn(r.edb, r.q, 2) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("denied queries are refused") {
  auto key = toy::owner_key();
  auto src = toy::source(1);
  Rng rng(3);
  const auto& qu = fixture::qu_keys_256();
  auto req = pr::qu_build_request(toy::query(), pr::public_domain(key), qu.pub, rng);
  auto out = pr::do_blind_query(key, req, Admission::deny, src);
  CHECK(std::holds_alternative<Refusal>(out));
}

TEST_CASE("a modulus too small for the blinded values is refused") {
  Rng rng(18);
  auto key = pr::keygen(small_params(3, 2, 2), 1000000, rng);
  auto tiny = paillier::keygen(64, rng);
  SeededSource src(rng);
  auto req = pr::qu_build_request(IntVector{1, 2, 3}, pr::public_domain(key), tiny.pub, rng);
  CHECK_THROWS_AS(pr::do_blind_query(key, req, Admission::allow, src), NormalizerOverflow);
}

TEST_CASE("replay source runs dry") {
  ReplaySource::Script s;
  s.tau_free = {1};
  ReplaySource src(s, 1);
  CHECK(src.tau_free() == 1);
  CHECK_THROWS_AS(src.tau_free(), Error);
  CHECK(src.replay());
}

TEST_CASE("seeded draws respect their ranges") {
  Rng rng(19);
  SeededSource src(rng);
  for (int i = 0; i < 500; ++i) {
    Rational t = src.tau_free();
    CHECK((t >= Rational(1, 10) && t <= 1000));
    CHECK(gcd(t.get_num(), t.get_den()) == 1);
    Rational a = src.alpha_offset(7);
    CHECK((a > 0 && a < 7));
    Integer b1 = src.beta1_units(100);
    CHECK((b1 >= 100 && b1 <= Integer(65536) * 100));
    Integer b2 = src.beta2_units(b1, 50);
    CHECK(b2 > b1 * 50);
    Integer u = src.slot_rand_units();
    CHECK((u >= 1 && u <= 65536));
  }
  auto sh = src.coordinate_shuffle(6);
  std::set<std::size_t> seen(sh.begin(), sh.end());
  CHECK(seen.size() == 6);
}
