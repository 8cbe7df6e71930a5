#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sknn/baseline.hpp"
#include "sknn/paillier.hpp"
#include "sknn/proposed.hpp"
#include "sknn/protocol.hpp"

// File formats. Rationals are exact strings ("8.5", "-42.25", or "p/q" when
// no terminating decimal exists); big integers are decimal or 0x-hex text.
namespace sknn::io {

using nlohmann::json;

json to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);
json to_json(const Vector& v);
Vector vector_from_json(const json& j);
json to_json(const IntVector& v);
IntVector int_vector_from_json(const json& j);

/// "proposed" or "baseline"; throws DomainError when the tag is missing.
std::string scheme_of(const json& key_doc);

json to_json(const proposed::OwnerKey& key);
proposed::OwnerKey owner_key_from_json(const json& j);
json to_json(const baseline::BaselineKey& key);
baseline::BaselineKey baseline_key_from_json(const json& j);

std::string to_hex(const Integer& x);
json to_json(const paillier::Keypair& kp);  // {n, g, lambda, mu}
paillier::Keypair paillier_keypair_from_json(const json& j);
json to_json(const paillier::PublicKey& pk);  // {n, g}
paillier::PublicKey paillier_public_from_json(const json& j);

/// One JSON object per line: {"scheme", "index", "coords": [...]}.
void write_edb(std::ostream& out, const std::string& scheme, const std::vector<EncTuple>& edb);
/// Returns the scheme tag (empty for an empty file) and the tuples.
std::pair<std::string, std::vector<EncTuple>> read_edb(std::istream& in);

/// Rows of coordinates divided back by `scale`, comma separated.
void write_csv(std::ostream& out, const std::vector<Vector>& rows, const Integer& scale);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace sknn::io
