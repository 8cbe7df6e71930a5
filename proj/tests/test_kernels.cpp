#include <doctest.h>

#include "fixtures.hpp"
#include "sknn/errors.hpp"
#include "sknn/kernels.hpp"

using namespace sknn;
namespace kn = sknn::kernels;

namespace {

std::vector<Vector> random_rows(std::size_t n, std::size_t w, Rng& rng) {
  std::vector<Vector> rows(n, Vector(w));
  for (auto& r : rows) {
    for (auto& x : r) {
      x = Rational(Integer(rng.uniform(0, 2000)) - 1000, Integer(rng.uniform(1, 9)));
      x.canonicalize();
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("rows times matrix: serial, parallel and direct agree") {
  Rng rng(51);
  Matrix m = sample_invertible(7, rng);
  auto scaled = ScaledIntMatrix::from(m);
  auto rows = random_rows(33, 7, rng);
  std::uint64_t ms = 0, mp = 0;
  auto s = kn::rows_times_matrix(rows, scaled, kn::Exec::serial, &ms);
  auto p = kn::rows_times_matrix(rows, scaled, kn::Exec::parallel, &mp);
  CHECK(s == p);
  CHECK(ms == 33u * 49u);
  CHECK(mp == ms);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(s[i] == vec_mat_mul(rows[i], m));
}

TEST_CASE("dot each") {
  Rng rng(52);
  auto rows = random_rows(20, 5, rng);
  IntVector q{3, -1, 4, 1, -5};
  std::uint64_t macs = 0;
  auto s = kn::dot_each(rows, q, kn::Exec::serial, &macs);
  auto p = kn::dot_each(rows, q, kn::Exec::parallel);
  CHECK(s == p);
  CHECK(macs == 100);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(s[i] == dot(rows[i], to_rationals(q)));
  CHECK_THROWS_AS(kn::dot_each(rows, IntVector{1}, kn::Exec::serial), DimensionMismatch);
}

TEST_CASE("encrypted matrix-vector product") {
  Rng rng(53);
  const auto& kp = fixture::qu_keys_256();
  Matrix m = Matrix::from_rows({{1, -2, 3}, {0, 5, 7}});
  auto exps = ScaledIntMatrix::from(m);
  IntVector v{10, -20, 30};
  std::vector<paillier::Ciphertext> cv;
  for (const auto& x : v) cv.push_back(paillier::encrypt(kp.pub, x, rng));
  std::uint64_t es = 0, ep = 0;
  auto s = kn::encrypted_mat_vec(kp.pub, exps, cv, kn::Exec::serial, &es);
  auto p = kn::encrypted_mat_vec(kp.pub, exps, cv, kn::Exec::parallel, &ep);
  CHECK(s == p);
  CHECK(es == 6);
  CHECK(ep == 6);
  CHECK(paillier::decrypt(kp.priv, s[0]) == 140);
  CHECK(paillier::decrypt(kp.priv, s[1]) == 110);
  auto frac = ScaledIntMatrix::from(Matrix::from_rows({{Rational(1, 2), 1, 1}}));
  CHECK_THROWS_AS(kn::encrypted_mat_vec(kp.pub, frac, cv, kn::Exec::serial), DomainError);
}

TEST_CASE("k smallest with ties") {
  Vector scores{5, 1, 3, 1, 2};
  CHECK(kn::select_k_smallest(scores, 3) == std::vector<std::size_t>{1, 3, 4});
  CHECK(kn::select_k_smallest(scores, 5) == std::vector<std::size_t>{1, 3, 4, 2, 0});
  CHECK(kn::select_k_smallest(scores, 0).empty());
  CHECK_THROWS_AS(kn::select_k_smallest(scores, 6), KTooLarge);
}
