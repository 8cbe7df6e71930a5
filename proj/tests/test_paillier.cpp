#include <doctest.h>

#include "sknn/errors.hpp"
#include "sknn/paillier.hpp"

using namespace sknn;
namespace pl = sknn::paillier;

namespace {

const pl::Keypair& shared_keys() {
  static const pl::Keypair kp = [] {
    Rng rng(11);
    return pl::keygen(256, rng);
  }();
  return kp;
}

Integer random_signed(Rng& rng, unsigned bits) {
  Integer x = rng.random_bits(bits);
  return rng.coin() ? Integer(-x) : x;
}

}  // namespace

TEST_CASE("keygen produces a modulus of the requested size") {
  Rng rng(5);
  for (unsigned bits : {64u, 128u, 257u}) {
    auto kp = pl::keygen(bits, rng);
    CHECK(kp.pub.bits() == bits);
    CHECK(kp.pub.g == kp.pub.n + 1);
    CHECK(kp.pub.n_squared == kp.pub.n * kp.pub.n);
  }
  CHECK_THROWS_AS(pl::keygen(32, rng), InvalidParams);
}

TEST_CASE("keygen is reproducible from the seed") {
  Rng a(99), b(99), c(100);
  auto ka = pl::keygen(128, a);
  auto kb = pl::keygen(128, b);
  auto kc = pl::keygen(128, c);
  CHECK(ka.pub == kb.pub);
  CHECK(ka.priv == kb.priv);
  CHECK_FALSE(ka.pub == kc.pub);
}

TEST_CASE("signed round trip") {
  const auto& kp = shared_keys();
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Integer m = random_signed(rng, 200);
    CHECK(pl::decrypt(kp.priv, pl::encrypt(kp.pub, m, rng)) == m);
  }
  CHECK(pl::decrypt(kp.priv, pl::encrypt(kp.pub, 0, rng)) == 0);
  CHECK(pl::decrypt(kp.priv, pl::encrypt(kp.pub, -1, rng)) == -1);
}

TEST_CASE("encryption is randomized") {
  const auto& kp = shared_keys();
  Rng rng(2);
  auto a = pl::encrypt(kp.pub, 42, rng);
  auto b = pl::encrypt(kp.pub, 42, rng);
  CHECK_FALSE(a == b);
}

TEST_CASE("homomorphic add, scale and negate") {
  const auto& kp = shared_keys();
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Integer a = random_signed(rng, 100);
    Integer b = random_signed(rng, 100);
    Integer k = random_signed(rng, 60);
    auto ca = pl::encrypt(kp.pub, a, rng);
    auto cb = pl::encrypt(kp.pub, b, rng);
    CHECK(pl::decrypt(kp.priv, pl::hom_add(kp.pub, ca, cb)) == a + b);
    CHECK(pl::decrypt(kp.priv, pl::hom_scale(kp.pub, ca, k)) == a * k);
    CHECK(pl::decrypt(kp.priv, pl::hom_neg(kp.pub, ca)) == -a);
  }
}

TEST_CASE("plaintext range is the open half-modulus interval") {
  const auto& kp = shared_keys();
  const Integer& n = kp.pub.n;
  Integer half = (n - 1) / 2;  // n odd
  CHECK(pl::in_range(kp.pub, half));
  CHECK(pl::in_range(kp.pub, -half));
  CHECK_FALSE(pl::in_range(kp.pub, half + 1));
  CHECK_FALSE(pl::in_range(kp.pub, -(half + 1)));
  Rng rng(4);
  CHECK_THROWS_AS(pl::encrypt(kp.pub, half + 1, rng), PlaintextOutOfRange);
  CHECK(pl::encode_signed(kp.pub, -1) == n - 1);
  CHECK(pl::decode_signed(kp.pub, n - 1) == -1);
  CHECK(pl::decode_signed(kp.pub, half) == half);
}

TEST_CASE("malformed ciphertexts are rejected") {
  const auto& kp = shared_keys();
  CHECK_THROWS_AS(pl::decrypt(kp.priv, pl::Ciphertext(Integer(0))), InvalidCiphertext);
  CHECK_THROWS_AS(pl::decrypt(kp.priv, pl::Ciphertext(kp.pub.n_squared)), InvalidCiphertext);
  CHECK_THROWS_AS(pl::decrypt(kp.priv, pl::Ciphertext(kp.pub.n)), InvalidCiphertext);
}

TEST_CASE("public key from a modulus") {
  auto pk = pl::PublicKey::from_modulus(Integer(77));
  CHECK(pk.g == 78);
  CHECK(pk.n_squared == 5929);
  CHECK_THROWS_AS(pl::PublicKey::from_modulus(Integer(76)), InvalidParams);
}
