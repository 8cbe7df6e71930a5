#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sknn/attacks.hpp"
#include "sknn/baseline.hpp"
#include "sknn/counters.hpp"
#include "sknn/ephemeral.hpp"
#include "sknn/paillier.hpp"
#include "sknn/proposed.hpp"

namespace sknn::harness {

// ---------------------------------------------------------------- sessions

enum class MessageKind { QueryRequest, BlindedQuery, Refusal, CspQuery, KnnRequest, KnnResult };
std::string to_string(MessageKind kind);

struct Message {
  std::string sender;
  std::string receiver;
  MessageKind kind;
  nlohmann::json payload;
  std::uint64_t seq = 0;

  nlohmann::json to_json() const;
};

struct Transcript {
  std::string session_id;
  std::vector<Message> messages;
  std::vector<std::size_t> result;  // empty when refused
  bool refused = false;

  /// One JSON object per message, then nothing else.
  std::string to_jsonl() const;
};

/// Delivery seam between the actors. The in-process bus hands each message
/// straight to its receiver; a networked bus would serialize here.
class MessageBus {
 public:
  virtual ~MessageBus() = default;
  /// Called for every message before it reaches its receiver.
  virtual void observe(const Message& m) = 0;
};

/// True when the kinds read QueryRequest (Refusal | BlindedQuery CspQuery
/// KnnRequest KnnResult) and sequence numbers strictly increase.
bool protocol_order_ok(const Transcript& t);

/// Runs QU, DO and CSP against each other for one query. The QU uses
/// `qu_keys` and draws its randomness from src.rng().
Transcript simulate_session(const proposed::OwnerKey& key, const std::vector<EncTuple>& edb, const IntVector& query,
                            std::size_t k, Admission policy, const paillier::Keypair& qu_keys, EphemeralSource& src,
                            const std::string& session_id = "session-0", MessageBus* bus = nullptr,
                            OpCounters* counters = nullptr, kernels::Exec exec = kernels::Exec::parallel);

// --------------------------------------------------------------- ingestion

/// Numeric CSV rows scaled by `data_scale` and rounded to integers.
/// `d == 0` takes the width of the first row. Throws MalformedRow,
/// DimensionMismatch.
std::vector<IntVector> ingest_csv(std::istream& in, const Integer& data_scale, std::size_t d = 0);
std::vector<IntVector> ingest_csv(const std::string& path, const Integer& data_scale, std::size_t d = 0);

// ----------------------------------------------------------------- counting

enum class Scheme { proposed, baseline };
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct RunDescriptor {
  Scheme scheme = Scheme::proposed;
  std::size_t d = 0;
  std::size_t c = 0;
  std::size_t epsilon = 0;
  std::size_t m = 0;
  std::size_t eta() const { return scheme == Scheme::proposed ? d + 2 + c + epsilon : d + 1 + c + epsilon; }
};

/// Closed-form counts for one key, m encrypted tuples and one query:
/// keygen eta^2 entries, db-encrypt m eta^2, query-blind eta^2 MACs and
/// eta^2 exponentiations plus eta - d slot encodings and d query powers,
/// knn m eta.
OpCounters count_ops(const RunDescriptor& run);

struct BenchConfig {
  std::vector<Scheme> schemes{Scheme::proposed, Scheme::baseline};
  std::vector<std::size_t> dims{5, 10};
  std::vector<std::size_t> sizes{500, 1000};
  std::size_t repetitions = 1;
  std::size_t k = 5;
  unsigned paillier_bits = 1024;
  std::uint64_t seed = 1;
  kernels::Exec exec = kernels::Exec::parallel;
};

inline constexpr const char* kBenchHeader = "phase,scheme,d,m,k,wall_ns,mac_count,paillier_ops";

/// Writes the header, then one row per (scheme, d, m, repetition, phase).
/// Proposed runs use c = 5 (or d when d < 5) and epsilon = 10; baseline
/// runs use c = 5, epsilon = 5.
void bench(const BenchConfig& config, std::ostream& out);

// ------------------------------------------------------------ attack runs

struct BaselineInstance {
  baseline::BaselineKey key;
  std::vector<IntVector> db;
  std::vector<EncTuple> edb;
  paillier::Keypair qu;
};

BaselineInstance make_baseline_instance(const baseline::BaselineParams& params, std::size_t m,
                                        const Integer& coord_bound, unsigned paillier_bits, Rng& rng);

struct ProposedInstance {
  proposed::OwnerKey key;
  std::vector<IntVector> db;
  std::vector<EncTuple> edb;
  paillier::Keypair qu;
};

ProposedInstance make_proposed_instance(const proposed::SecurityParams& params, std::size_t m,
                                        const Integer& coord_bound, unsigned paillier_bits, Rng& rng);

/// A QU talking to the baseline DO: encrypt, blind, decrypt.
attacks::QueryOracle baseline_oracle(const BaselineInstance& inst, Rng& rng);
/// A QU talking to the proposed DO, skipping its own coordinate check.
attacks::QueryOracle proposed_oracle(const ProposedInstance& inst, Rng& rng);

// Verdicts. These compare against ground truth and are the only place a
// report's verdict is set.
bool judge_columns(const std::vector<IntVector>& columns, const baseline::BaselineKey& key);
bool judge_database(const std::vector<Vector>& recovered, const std::vector<IntVector>& truth);
bool judge_query(const Vector& recovered, const IntVector& truth);
/// Number of candidate vectors equal to some column of M_hat or of
/// matrix_scale * M_hat.
std::size_t count_column_matches(const std::vector<IntVector>& candidates, const proposed::OwnerKey& key);

attacks::AttackReport run_level1(const BaselineInstance& inst, const Integer& n, Rng& rng);
/// Level 1 followed by level 2 and database recovery with `known` random
/// plaintexts. NoUniqueCandidate propagates.
attacks::AttackReport run_level2(const BaselineInstance& inst, std::size_t known, const Integer& n, Rng& rng);
/// CSP-side query recovery from the first d + 2 tuples as known pairs.
attacks::AttackReport run_query_recovery(const BaselineInstance& inst, const IntVector& query, Rng& rng);
attacks::AttackReport run_resistance(const ProposedInstance& inst, attacks::ProbeCase which, std::size_t trials,
                                     const Integer& n, Rng& rng);

}  // namespace sknn::harness
