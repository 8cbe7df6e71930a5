#pragma once

#include <variant>
#include <vector>

#include "sknn/proposed.hpp"
#include "sknn/toy.hpp"

namespace fixture {

using namespace sknn;

struct ToyRun {
  proposed::OwnerKey key;
  std::vector<EncTuple> edb;
  std::vector<proposed::TupleSecrets> tuple_secrets;
  paillier::Keypair qu;
  proposed::Blinding blinding;
  CspQuery q;
};

inline ToyRun run_toy(std::uint64_t seed = 1) {
  ToyRun r{toy::owner_key(), {}, {}, {}, {}, {}};
  auto src = toy::source(seed);
  auto db = toy::database();
  for (std::size_t i = 0; i < db.size(); ++i) {
    r.tuple_secrets.push_back(proposed::gen_tau(r.key, src));
    r.edb.push_back(proposed::encrypt_tuple_with(r.key, db[i], r.tuple_secrets.back(), i));
  }
  r.qu = paillier::keygen(256, src.rng());
  auto req = proposed::qu_build_request(toy::query(), proposed::public_domain(r.key), r.qu.pub, src.rng());
  r.blinding = std::get<proposed::Blinding>(proposed::do_blind_query(r.key, req, Admission::allow, src));
  r.q = proposed::qu_unwrap(r.qu.priv, r.blinding.blinded);
  return r;
}

inline const paillier::Keypair& qu_keys_256() {
  static const paillier::Keypair kp = [] {
    Rng rng(2024);
    return paillier::keygen(256, rng);
  }();
  return kp;
}

inline std::vector<IntVector> random_points(std::size_t m, std::size_t d, std::uint64_t hi, Rng& rng) {
  std::vector<IntVector> out(m, IntVector(d));
  for (auto& p : out) {
    for (auto& x : p) x = rng.uniform(0, hi);
  }
  return out;
}

}  // namespace fixture
