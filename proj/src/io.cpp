#include "sknn/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "sknn/errors.hpp"

namespace sknn::io {

namespace {

Rational rational_from(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(Integer(j.dump()));
  throw DomainError("expected an exact numeric string, got " + j.dump());
}

Integer integer_from(const json& j) {
  if (j.is_string()) return parse_integer(j.get<std::string>());
  if (j.is_number_integer()) return Integer(j.dump());
  throw DomainError("expected an integer, got " + j.dump());
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw DomainError(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::size_t size_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_number_unsigned()) throw DomainError(std::string("field '") + name + "' must be a non-negative integer");
  return f.get<std::size_t>();
}

std::string bits_to_string(const std::vector<std::uint8_t>& b) {
  std::string s;
  for (auto x : b) s += x != 0 ? '1' : '0';
  return s;
}

std::vector<std::uint8_t> bits_from_string(const std::string& s) {
  std::vector<std::uint8_t> b;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw DomainError("b must be a bit string");
    b.push_back(ch == '1' ? 1 : 0);
  }
  return b;
}

Permutation perm_from(const json& j) {
  std::vector<std::size_t> idx;
  for (const auto& x : j) idx.push_back(x.get<std::size_t>());
  return Permutation(std::move(idx));
}

}  // namespace

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (const auto& x : m.row(r)) row.push_back(to_exact_string(x));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("matrix must be an array of rows");
  std::vector<Vector> rows;
  for (const auto& row : j) rows.push_back(vector_from_json(row));
  return Matrix::from_rows(rows);
}

json to_json(const Vector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_exact_string(x));
  return out;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("expected an array");
  Vector out;
  for (const auto& x : j) out.push_back(rational_from(x));
  return out;
}

json to_json(const IntVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(x.get_str());
  return out;
}

IntVector int_vector_from_json(const json& j) {
  if (!j.is_array()) throw DomainError("expected an array");
  IntVector out;
  for (const auto& x : j) out.push_back(integer_from(x));
  return out;
}

std::string scheme_of(const json& key_doc) {
  const json& s = field(key_doc, "scheme");
  if (!s.is_string()) throw DomainError("scheme tag must be a string");
  return s.get<std::string>();
}

json to_json(const proposed::OwnerKey& key) {
  const auto& p = key.params;
  json j;
  j["scheme"] = "proposed";
  j["params"] = {{"d", p.d},
                 {"c", p.c},
                 {"epsilon", p.epsilon},
                 {"data_scale", p.data_scale.get_str()},
                 {"matrix_scale", p.matrix_scale.get_str()},
                 {"query_scale", p.query_scale.get_str()},
                 {"alpha_form", p.alpha_form == proposed::AlphaForm::scalar ? "scalar" : "per-coordinate"}};
  j["M"] = to_json(key.m);
  j["s"] = to_json(key.s);
  j["sigma"] = to_json(key.sigma);
  j["b"] = bits_to_string(key.b);
  j["w"] = to_json(key.w);
  j["pi"] = key.pi.indices();
  j["bound"] = to_json(key.bound);
  return j;
}

proposed::OwnerKey owner_key_from_json(const json& j) {
  if (scheme_of(j) != "proposed") throw DomainError("not a proposed-scheme key");
  const json& pj = field(j, "params");
  proposed::SecurityParams p;
  p.d = size_field(pj, "d");
  p.c = size_field(pj, "c");
  p.epsilon = size_field(pj, "epsilon");
  p.data_scale = integer_from(field(pj, "data_scale"));
  p.matrix_scale = integer_from(field(pj, "matrix_scale"));
  p.query_scale = integer_from(field(pj, "query_scale"));
  std::string form = pj.value("alpha_form", "per-coordinate");
  if (form == "scalar") {
    p.alpha_form = proposed::AlphaForm::scalar;
  } else if (form != "per-coordinate") {
    throw DomainError("unknown alpha_form '" + form + "'");
  }
  return proposed::OwnerKey::assemble(p, matrix_from_json(field(j, "M")), perm_from(field(j, "pi")),
                                      vector_from_json(field(j, "s")), int_vector_from_json(field(j, "sigma")),
                                      bits_from_string(field(j, "b").get<std::string>()),
                                      int_vector_from_json(field(j, "w")), int_vector_from_json(field(j, "bound")));
}

json to_json(const baseline::BaselineKey& key) {
  const auto& p = key.params;
  json j;
  j["scheme"] = "baseline";
  j["params"] = {{"d", p.d},
                 {"c", p.c},
                 {"epsilon", p.epsilon},
                 {"mode", p.mode == baseline::Mode::integerized ? "integerized" : "real"}};
  j["M"] = to_json(key.m);
  j["s"] = to_json(key.s);
  j["tau"] = to_json(key.tau);
  j["pi"] = key.pi.indices();
  j["bound"] = to_json(key.bound);
  return j;
}

baseline::BaselineKey baseline_key_from_json(const json& j) {
  if (scheme_of(j) != "baseline") throw DomainError("not a baseline-scheme key");
  const json& pj = field(j, "params");
  baseline::BaselineParams p;
  p.d = size_field(pj, "d");
  p.c = size_field(pj, "c");
  p.epsilon = size_field(pj, "epsilon");
  std::string mode = pj.value("mode", "integerized");
  if (mode == "real") {
    p.mode = baseline::Mode::real;
  } else if (mode != "integerized") {
    throw DomainError("unknown baseline mode '" + mode + "'");
  }
  return baseline::BaselineKey::assemble(p, matrix_from_json(field(j, "M")), perm_from(field(j, "pi")),
                                         vector_from_json(field(j, "s")), vector_from_json(field(j, "tau")),
                                         int_vector_from_json(field(j, "bound")));
}

std::string to_hex(const Integer& x) {
  if (x < 0) return "-0x" + Integer(-x).get_str(16);
  return "0x" + x.get_str(16);
}

json to_json(const paillier::Keypair& kp) {
  return {{"n", to_hex(kp.pub.n)},
          {"g", to_hex(kp.pub.g)},
          {"lambda", to_hex(kp.priv.lambda)},
          {"mu", to_hex(kp.priv.mu)}};
}

paillier::Keypair paillier_keypair_from_json(const json& j) {
  paillier::Keypair kp;
  kp.pub = paillier_public_from_json(j);
  kp.priv.pub = kp.pub;
  kp.priv.lambda = integer_from(field(j, "lambda"));
  kp.priv.mu = integer_from(field(j, "mu"));
  return kp;
}

json to_json(const paillier::PublicKey& pk) { return {{"n", to_hex(pk.n)}, {"g", to_hex(pk.g)}}; }

paillier::PublicKey paillier_public_from_json(const json& j) {
  auto pk = paillier::PublicKey::from_modulus(integer_from(field(j, "n")));
  if (j.contains("g") && integer_from(j.at("g")) != pk.g) throw DomainError("only g = n + 1 is supported");
  return pk;
}

void write_edb(std::ostream& out, const std::string& scheme, const std::vector<EncTuple>& edb) {
  for (const auto& t : edb) {
    json line;
    line["scheme"] = scheme;
    line["index"] = t.index;
    line["coords"] = to_json(t.coords);
    out << line.dump() << '\n';
  }
}

std::pair<std::string, std::vector<EncTuple>> read_edb(std::istream& in) {
  std::pair<std::string, std::vector<EncTuple>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw MalformedRow("encrypted database line " + std::to_string(lineno) + ": " + e.what());
    }
    std::string scheme = scheme_of(j);
    if (out.first.empty()) {
      out.first = scheme;
    } else if (scheme != out.first) {
      throw DomainError("encrypted database mixes schemes");
    }
    out.second.push_back(EncTuple{size_field(j, "index"), vector_from_json(field(j, "coords"))});
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<Vector>& rows, const Integer& scale) {
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i > 0) out << ',';
      out << to_exact_string(Rational(r[i] / scale));
    }
    out << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace sknn::io
