#pragma once

#include "sknn/rational.hpp"
#include "sknn/rng.hpp"

// Additively homomorphic Paillier encryption with g = n + 1 and signed
// plaintexts encoded as residues mod n (values above n/2 decode negative).
// Keys and ciphertexts are immutable values; only the Rng is stateful.
namespace sknn::paillier {

struct PublicKey {
  Integer n;
  Integer n_squared;
  Integer g;

  static PublicKey from_modulus(const Integer& n);
  unsigned bits() const;
  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct PrivateKey {
  Integer lambda;
  Integer mu;
  PublicKey pub;

  friend bool operator==(const PrivateKey&, const PrivateKey&) = default;
};

struct Keypair {
  PublicKey pub;
  PrivateKey priv;
};

class Ciphertext {
 public:
  Ciphertext() = default;
  explicit Ciphertext(Integer value) : value_(std::move(value)) {}
  const Integer& value() const { return value_; }
  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;

 private:
  Integer value_;
};

/// `bits` >= 64; the modulus has exactly `bits` bits. Primes come from
/// Miller-Rabin with 64 rounds.
Keypair keygen(unsigned bits, Rng& rng);

/// True when 2|m| < n.
bool in_range(const PublicKey& pk, const Integer& m);
/// Throws PlaintextOutOfRange unless in_range.
Integer encode_signed(const PublicKey& pk, const Integer& m);
Integer decode_signed(const PublicKey& pk, const Integer& residue);

Ciphertext encrypt(const PublicKey& pk, const Integer& m, Rng& rng);
/// Throws InvalidCiphertext when the value is out of [1, n^2) or shares a
/// factor with n.
Integer decrypt(const PrivateKey& sk, const Ciphertext& c);

/// E(m1) * E(m2) = E(m1 + m2)
Ciphertext hom_add(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
/// E(m)^k = E(k m); k is reduced mod n first, so negative k works.
Ciphertext hom_scale(const PublicKey& pk, const Ciphertext& c, const Integer& k);
/// E(m)^(n-1) = E(-m)
Ciphertext hom_neg(const PublicKey& pk, const Ciphertext& c);

}  // namespace sknn::paillier
