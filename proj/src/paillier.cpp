#include "sknn/paillier.hpp"

#include <string>

#include "sknn/errors.hpp"

namespace sknn::paillier {

namespace {

constexpr int kPrimalityRounds = 64;

// Prime of exactly `bits` bits with the top two bits set, so the product of
// two such primes has exactly bits_p + bits_q bits.
Integer random_prime(unsigned bits, Rng& rng) {
  for (;;) {
    Integer x = rng.random_bits(bits);
    mpz_setbit(x.get_mpz_t(), bits - 1);
    mpz_setbit(x.get_mpz_t(), bits - 2);
    mpz_setbit(x.get_mpz_t(), 0);
    if (mpz_probab_prime_p(x.get_mpz_t(), kPrimalityRounds) > 0) return x;
  }
}

Integer powm(const Integer& base, const Integer& exp, const Integer& mod) {
  Integer out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return out;
}

}  // namespace

PublicKey PublicKey::from_modulus(const Integer& n) {
  if (n < 3 || mpz_even_p(n.get_mpz_t())) throw InvalidParams("Paillier modulus must be odd and > 2");
  PublicKey pk;
  pk.n = n;
  pk.n_squared = n * n;
  pk.g = n + 1;
  return pk;
}

unsigned PublicKey::bits() const { return static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2)); }

Keypair keygen(unsigned bits, Rng& rng) {
  if (bits < 64) throw InvalidParams("Paillier modulus needs at least 64 bits, got " + std::to_string(bits));
  const unsigned p_bits = (bits + 1) / 2;
  const unsigned q_bits = bits / 2;
  for (;;) {
    Integer p = random_prime(p_bits, rng);
    Integer q = random_prime(q_bits, rng);
    if (p == q) continue;
    Integer n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != bits) continue;
    Integer pm1 = p - 1;
    Integer qm1 = q - 1;
    Integer phi = pm1 * qm1;
    Integer g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;

    Keypair kp;
    kp.pub = PublicKey::from_modulus(n);
    kp.priv.pub = kp.pub;
    mpz_lcm(kp.priv.lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    // with g = n + 1, L(g^lambda mod n^2) = lambda mod n
    if (mpz_invert(kp.priv.mu.get_mpz_t(), kp.priv.lambda.get_mpz_t(), n.get_mpz_t()) == 0) continue;
    return kp;
  }
}

bool in_range(const PublicKey& pk, const Integer& m) { return 2 * abs(m) < pk.n; }

Integer encode_signed(const PublicKey& pk, const Integer& m) {
  if (!in_range(pk, m)) {
    throw PlaintextOutOfRange("plaintext magnitude must stay below n/2 (" + std::to_string(pk.bits()) +
                              "-bit modulus)");
  }
  Integer r;
  mpz_mod(r.get_mpz_t(), m.get_mpz_t(), pk.n.get_mpz_t());
  return r;
}

Integer decode_signed(const PublicKey& pk, const Integer& residue) {
  Integer r;
  mpz_mod(r.get_mpz_t(), residue.get_mpz_t(), pk.n.get_mpz_t());
  if (2 * r > pk.n) r -= pk.n;
  return r;
}

Ciphertext encrypt(const PublicKey& pk, const Integer& m, Rng& rng) {
  Integer encoded = encode_signed(pk, m);
  Integer r;
  Integer g;
  do {
    r = rng.uniform(Integer(1), Integer(pk.n - 1));
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
  } while (g != 1);
  // (1 + n)^m = 1 + m n  (mod n^2)
  Integer gm = 1 + encoded * pk.n;
  Integer rn = powm(r, pk.n, pk.n_squared);
  Integer c = gm * rn;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return Ciphertext(std::move(c));
}

Integer decrypt(const PrivateKey& sk, const Ciphertext& c) {
  const PublicKey& pk = sk.pub;
  const Integer& v = c.value();
  if (v < 1 || v >= pk.n_squared) throw InvalidCiphertext("ciphertext outside [1, n^2)");
  Integer g;
  mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), pk.n.get_mpz_t());
  if (g != 1) throw InvalidCiphertext("ciphertext shares a factor with n");
  Integer u = powm(v, sk.lambda, pk.n_squared);
  Integer l = (u - 1) / pk.n;
  Integer m = l * sk.mu;
  mpz_mod(m.get_mpz_t(), m.get_mpz_t(), pk.n.get_mpz_t());
  return decode_signed(pk, m);
}

Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  Integer c = a.value() * b.value();
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return Ciphertext(std::move(c));
}

Ciphertext hom_scale(const PublicKey& pk, const Ciphertext& c, const Integer& k) {
  Integer e;
  mpz_mod(e.get_mpz_t(), k.get_mpz_t(), pk.n.get_mpz_t());
  return Ciphertext(powm(c.value(), e, pk.n_squared));
}

Ciphertext hom_neg(const PublicKey& pk, const Ciphertext& c) { return hom_scale(pk, c, pk.n - 1); }

}  // namespace sknn::paillier
