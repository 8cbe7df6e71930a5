#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sknn/baseline.hpp"
#include "sknn/protocol.hpp"
#include "sknn/rational.hpp"

// Cryptanalysis of the baseline scheme and the matching probes against the
// proposed one. Nothing here sees a secret key: verdicts are the caller's job.
namespace sknn::attacks {

/// A querying party's view of the data owner: plaintext query in, decrypted
/// blinded query q' out.
using QueryOracle = std::function<IntVector(const IntVector& q)>;

/// Common factor of q'. With subset_size == q'.size() this is the gcd of the
/// whole vector. Otherwise the most frequent gcd != 1 over all subsets of
/// that size; throws AmbiguousBeta when there is none or a tie.
Integer recover_beta(std::span<const Integer> q_prime, std::size_t subset_size);

/// N for the baseline level-1 attack: 2^32 times the residual bound.
Integer default_level1_n(const baseline::BaselineParams& params);

/// One query N e_j; returns floor((q' / beta) / N).
IntVector level1_recover_column(const QueryOracle& oracle, std::size_t j, std::size_t d, const Integer& n);

struct Level1Result {
  std::vector<IntVector> columns;  // d columns
  std::size_t queries = 0;
};

/// Repeats each column query until two answers agree (a spurious factor in
/// the recovered beta never repeats). Throws AmbiguousBeta after
/// `max_queries_per_column` queries without agreement.
Level1Result level1_recover_columns(const QueryOracle& oracle, std::size_t d, const Integer& n,
                                    std::size_t max_queries_per_column = 8);

/// Candidate-s fingerprint -> (known-plaintext column, encrypted row) hits.
class CollisionTable {
 public:
  void add(const std::string& fingerprint, const Vector& candidate, std::size_t column, std::size_t row);
  /// Fingerprints seen in every one of `columns` columns.
  std::vector<std::string> in_all_columns(std::size_t columns) const;
  const Vector& candidate(const std::string& fingerprint) const { return candidates_.at(fingerprint); }
  std::size_t size() const { return hits_.size(); }
  /// Number of fingerprints hit more than once inside a single column.
  std::size_t intra_column_collisions() const;

 private:
  std::map<std::string, std::set<std::pair<std::size_t, std::size_t>>> hits_;
  std::map<std::string, Vector> candidates_;
};

struct Level2Result {
  Vector s;  // first d entries of the shift vector
  std::size_t table_size = 0;
  std::size_t intra_column_collisions = 0;
};

/// s_j = 2 p_uj + p'_i . col_j for every (known plaintext u, row i); the
/// answer is the one candidate present in every column. Throws
/// NoUniqueCandidate (also when fewer than two plaintexts are known).
Level2Result level2_recover_s(const std::vector<EncTuple>& edb, const std::vector<IntVector>& known,
                              const std::vector<IntVector>& columns, unsigned digits = 3);

/// p_ij = (s_j - p'_i . col_j) / 2
std::vector<Vector> recover_database(const Vector& s, const std::vector<IntVector>& columns,
                                     const std::vector<EncTuple>& edb);

struct KnownPair {
  Vector p;
  Vector p_prime;
};

struct QueryRecovery {
  Vector q;
  std::size_t singular_selections = 0;
};

/// Solves 2(p_a - p_k).q = |p_a|^2 - |p_k|^2 - (p'_a - p'_k).y over d+1
/// pairs, y = q' / beta. Walks pair selections in lexicographic order until
/// one is non-singular; throws SingularAfterRetries.
QueryRecovery recover_query(const Vector& q_over_beta, const std::vector<KnownPair>& pairs,
                            std::size_t max_selections = 4096);

/// Same system with beta as an extra unknown (needs d+2 pairs).
QueryRecovery recover_query_unscaled(const IntVector& q_prime, const std::vector<KnownPair>& pairs,
                                     std::size_t max_selections = 4096);

/// 1 - exp(-4 t^2 / 10^(w d)), evaluated literally in double precision.
double collision_probability(double t, double w, double d);

enum class ProbeCase { zero_query, unit_query, scaled_unit_query };
std::string to_string(ProbeCase c);
ProbeCase parse_probe_case(const std::string& s);

struct ProbeResult {
  std::vector<IntVector> responses;   // raw q'
  std::vector<IntVector> candidates;  // level-1 quotient vectors
  std::size_t distinct_responses = 0;
  std::size_t distinct_candidates = 0;
};

/// Runs the level-1 procedure `trials` times with the same query against an
/// oracle (meant to be the proposed scheme's data owner).
ProbeResult probe_proposed_resistance(const QueryOracle& oracle, ProbeCase which, std::size_t d, std::size_t trials,
                                      const Integer& n, std::size_t column = 0);

/// Ground truth a residual check needs; only the harness has it.
struct ResidualTruth {
  std::vector<IntVector> plaintexts;
  IntVector q;
  Integer beta2_units;
  Integer matrix_scale;
};

/// (p'_i - p'_j).q' / matrix_scale - beta2 (ED_i^2 - ED_j^2), which equals
/// beta1 (alpha_i - alpha_j) in query-scale units.
Rational residual_check(const std::vector<EncTuple>& edb, const CspQuery& q, std::pair<std::size_t, std::size_t> pair,
                        const ResidualTruth& truth);

struct AttackReport {
  std::string attack;
  nlohmann::json recovered = nlohmann::json::object();
  std::optional<bool> verdict;  // set by the harness
  std::size_t trials = 0;
  nlohmann::json stats = nlohmann::json::object();
  std::optional<double> predicted_collision_probability;

  nlohmann::json to_json() const;
};

}  // namespace sknn::attacks
