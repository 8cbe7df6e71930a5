// sknn: key generation, database encryption, query sessions, attack demos,
// the worked example and benchmarks.
//
// Exit codes: 0 ok, 2 usage, 3 domain error, 4 attack inconclusive.

#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sknn/attacks.hpp"
#include "sknn/baseline.hpp"
#include "sknn/errors.hpp"
#include "sknn/harness.hpp"
#include "sknn/io.hpp"
#include "sknn/proposed.hpp"
#include "sknn/toy.hpp"

using namespace sknn;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kDomain = 3;
constexpr int kInconclusive = 4;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SKNN_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw InvalidParams("SKNN_SEED is not an unsigned integer");
    }
  }
  return 1;
}

IntVector parse_point(const std::string& text, const Integer& scale) {
  std::istringstream in(text);
  auto rows = harness::ingest_csv(in, scale);
  if (rows.size() != 1) throw InvalidParams("--point needs exactly one comma-separated row");
  return rows.front();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return in;
}

void print_verdict_table(const attacks::AttackReport& r) {
  auto cell = [](const std::string& k, const std::string& v) {
    std::cout << std::left << std::setw(26) << k << v << '\n';
  };
  cell("attack", r.attack);
  cell("verdict", r.verdict ? (*r.verdict ? "MATCH" : "NO-MATCH") : "-");
  cell("trials", std::to_string(r.trials));
  for (const auto& [k, v] : r.stats.items()) cell(k, v.is_string() ? v.get<std::string>() : v.dump());
  if (r.predicted_collision_probability) {
    std::ostringstream p;
    p << std::setprecision(17) << *r.predicted_collision_probability;
    cell("collision_probability", p.str());
  }
}

struct Common {
  std::uint64_t seed = 1;
  int jobs = 0;
};

// ---------------------------------------------------------------- keygen
struct KeygenOpts {
  std::string scheme = "proposed";
  std::size_t d = 0, c = 0, epsilon = 0;
  std::string bound = "1000";
  std::string data_scale = "1000", matrix_scale = "10", query_scale = "100";
  std::string alpha_form = "per-coordinate";
  std::string mode = "integerized";
  bool toy = false;
  std::string out;
};

int cmd_keygen(const KeygenOpts& o, const Common& common) {
  json doc;
  if (o.toy) {
    doc = io::to_json(toy::owner_key());
  } else {
    if (o.d == 0) throw CLI::RequiredError("--dim");
    Rng rng(common.seed);
    Integer bound = parse_integer(o.bound);
    if (o.scheme == "proposed") {
      proposed::SecurityParams p;
      p.d = o.d;
      p.c = o.c;
      p.epsilon = o.epsilon;
      p.data_scale = parse_integer(o.data_scale);
      p.matrix_scale = parse_integer(o.matrix_scale);
      p.query_scale = parse_integer(o.query_scale);
      if (o.alpha_form == "scalar") {
        p.alpha_form = proposed::AlphaForm::scalar;
      } else if (o.alpha_form != "per-coordinate") {
        throw InvalidParams("--alpha-form must be per-coordinate or scalar");
      }
      for (const auto& w : p.validate()) std::cerr << "warning: " << w << '\n';
      doc = io::to_json(proposed::keygen(p, bound, rng));
    } else if (o.scheme == "baseline") {
      baseline::BaselineParams p{o.d, o.c, o.epsilon,
                                 o.mode == "real" ? baseline::Mode::real : baseline::Mode::integerized};
      if (o.mode != "real" && o.mode != "integerized") throw InvalidParams("--mode must be integerized or real");
      doc = io::to_json(baseline::keygen(p, bound, rng));
    } else {
      throw InvalidParams("--scheme must be proposed or baseline");
    }
  }
  if (o.out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    io::write_json_file(o.out, doc);
  }
  return 0;
}

// ------------------------------------------------------------ encrypt-db
struct DbOpts {
  std::string key, in, out;
};

int cmd_encrypt_db(const DbOpts& o, const Common& common) {
  json doc = io::read_json_file(o.key);
  const std::string scheme = io::scheme_of(doc);
  Rng rng(common.seed);
  std::vector<EncTuple> edb;
  if (scheme == "proposed") {
    auto key = io::owner_key_from_json(doc);
    auto db = harness::ingest_csv(o.in, key.params.data_scale, key.params.d);
    SeededSource src(rng);
    edb = proposed::encrypt_database(key, db, src);
  } else {
    auto key = io::baseline_key_from_json(doc);
    auto db = harness::ingest_csv(o.in, Integer(1), key.params.d);
    edb = baseline::encrypt_database(key, db, rng);
  }
  auto out = open_out(o.out);
  io::write_edb(out, scheme, edb);
  return 0;
}

int cmd_decrypt_db(const DbOpts& o) {
  json doc = io::read_json_file(o.key);
  const std::string scheme = io::scheme_of(doc);
  auto in = open_in(o.in);
  auto [tag, edb] = io::read_edb(in);
  if (!tag.empty() && tag != scheme) throw DomainError("database was encrypted under the " + tag + " scheme");
  std::vector<Vector> rows;
  Integer scale = 1;
  if (scheme == "proposed") {
    auto key = io::owner_key_from_json(doc);
    scale = key.params.data_scale;
    for (const auto& t : edb) rows.push_back(proposed::decrypt_tuple(key, t));
  } else {
    auto key = io::baseline_key_from_json(doc);
    for (const auto& t : edb) rows.push_back(baseline::decrypt_tuple(key, t));
  }
  auto out = open_out(o.out);
  io::write_csv(out, rows, scale);
  return 0;
}

// ----------------------------------------------------------------- query
struct QueryOpts {
  std::string key, db, point, transcript;
  std::size_t k = 1;
  unsigned paillier_bits = 1024;
  bool deny = false;
  bool toy = false;
};

int cmd_query(const QueryOpts& o, const Common& common) {
  json doc = io::read_json_file(o.key);
  const std::string scheme = io::scheme_of(doc);
  auto in = open_in(o.db);
  auto [tag, edb] = io::read_edb(in);
  if (!tag.empty() && tag != scheme) throw DomainError("database was encrypted under the " + tag + " scheme");
  if (o.k > edb.size()) throw KTooLarge("k = " + std::to_string(o.k) + " exceeds database size " + std::to_string(edb.size()));

  Rng rng(common.seed);
  std::vector<std::size_t> result;
  if (scheme == "proposed") {
    auto key = io::owner_key_from_json(doc);
    IntVector q = parse_point(o.point, key.params.data_scale);
    ReplaySource replay = toy::source(common.seed);
    SeededSource seeded(rng);
    EphemeralSource& src = o.toy ? static_cast<EphemeralSource&>(replay) : seeded;
    auto qu = paillier::keygen(o.paillier_bits, src.rng());
    auto t = harness::simulate_session(key, edb, q, o.k, o.deny ? Admission::deny : Admission::allow, qu, src);
    if (!o.transcript.empty()) open_out(o.transcript) << t.to_jsonl();
    if (t.refused) {
      std::cerr << "query refused by the data owner\n";
      return kDomain;
    }
    result = t.result;
  } else {
    if (o.toy) throw InvalidParams("--toy applies to the proposed scheme only");
    if (o.deny) throw InvalidParams("--deny applies to the proposed scheme only");
    auto key = io::baseline_key_from_json(doc);
    IntVector q = parse_point(o.point, Integer(1));
    auto qu = paillier::keygen(o.paillier_bits, rng);
    auto bq = baseline::blind_query(key, baseline::build_request(q, qu.pub, rng), rng);
    result = baseline::knn(edb, proposed::qu_unwrap(qu.priv, bq), o.k);
  }
  for (std::size_t i = 0; i < result.size(); ++i) std::cout << (i ? " " : "") << result[i];
  std::cout << '\n';
  return 0;
}

// ---------------------------------------------------------------- attack
struct AttackOpts {
  std::string kind;
  std::size_t d = 4, m = 10, known = 2, c = 2, epsilon = 2, trials = 20;
  std::string bound = "100";
  std::string n;
  std::string probe = "scaled-unit";
  unsigned paillier_bits = 256;
  std::string report;
  bool json_out = false;
};

int cmd_attack(const AttackOpts& o, const Common& common) {
  Rng rng(common.seed);
  Integer bound = parse_integer(o.bound);
  attacks::AttackReport r;
  if (o.kind == "resistance") {
    proposed::SecurityParams p;
    p.d = o.d;
    p.c = std::min<std::size_t>(o.c, o.d);
    p.epsilon = std::max<std::size_t>(o.epsilon, 2);
    p.data_scale = 1;
    auto inst = harness::make_proposed_instance(p, o.m, bound, o.paillier_bits, rng);
    Integer n = o.n.empty() ? Integer(1000000000) : parse_integer(o.n);
    r = harness::run_resistance(inst, attacks::parse_probe_case(o.probe), o.trials, n, rng);
  } else {
    baseline::BaselineParams p{o.d, o.c, o.epsilon, baseline::Mode::integerized};
    auto inst = harness::make_baseline_instance(p, o.m, bound, o.paillier_bits, rng);
    Integer n = o.n.empty() ? attacks::default_level1_n(p) : parse_integer(o.n);
    if (o.kind == "level1") {
      r = harness::run_level1(inst, n, rng);
    } else if (o.kind == "level2") {
      r = harness::run_level2(inst, o.known, n, rng);
    } else if (o.kind == "query-recovery") {
      IntVector q(o.d);
      for (auto& x : q) x = rng.uniform(Integer(0), bound);
      r = harness::run_query_recovery(inst, q, rng);
    } else {
      throw CLI::ValidationError("attack", "unknown attack '" + o.kind + "'");
    }
  }
  if (!o.report.empty()) io::write_json_file(o.report, r.to_json());
  if (o.json_out) {
    std::cout << r.to_json().dump(2) << '\n';
  } else {
    print_verdict_table(r);
  }
  return 0;
}

// -------------------------------------------------------------- demo-toy
int cmd_demo_toy(const Common& common) {
  const auto exp = toy::expected();
  auto key = toy::owner_key();
  auto src = toy::source(common.seed);
  int mismatches = 0;
  auto check = [&](const std::string& what, const std::string& got, const std::string& want) {
    bool ok = got == want;
    std::cout << std::left << std::setw(12) << what << std::setw(44) << got << (ok ? "ok" : "MISMATCH, expected " + want)
              << '\n';
    if (!ok) ++mismatches;
  };

  std::vector<EncTuple> edb;
  for (std::size_t i = 0; i < toy::database().size(); ++i) {
    auto secrets = proposed::gen_tau(key, src);
    if (i == 0) check("nom_p", to_exact_string(secrets.tau[key.last_zero()]), to_exact_string(exp.nom_p));
    edb.push_back(proposed::encrypt_tuple_with(key, toy::database()[i], secrets, i));
    for (std::size_t j = 0; j < edb[i].coords.size(); ++j) {
      check("p" + std::to_string(i + 1) + "'[" + std::to_string(j) + "]", to_fixed(edb[i].coords[j], 3),
            exp.p_prime[i][j]);
    }
  }

  auto qu = paillier::keygen(256, src.rng());
  auto req = proposed::qu_build_request(toy::query(), proposed::public_domain(key), qu.pub, src.rng());
  auto bl = std::get<proposed::Blinding>(proposed::do_blind_query(key, req, Admission::allow, src));
  check("nom_q", paillier::decrypt(qu.priv, bl.r_enc[key.last_one()]).get_str(), exp.nom_q.get_str());
  CspQuery q = proposed::qu_unwrap(qu.priv, bl.blinded);
  for (std::size_t j = 0; j < q.q_prime.size(); ++j) {
    check("q'[" + std::to_string(j) + "]", q.q_prime[j].get_str(), exp.q_prime[j].get_str());
  }
  for (std::size_t i = 0; i < edb.size(); ++i) {
    // the published scores were taken over 6-decimal copies of p'
    Rational shown = proposed::csp_score(proposed::quantize_tuple(edb[i], 6), q);
    check("score" + std::to_string(i + 1), to_fixed(shown, 3), exp.scores[i]);
    std::cout << std::setw(12) << "" << "exact " << to_exact_string(proposed::csp_score(edb[i], q)) << '\n';
  }
  auto nn = proposed::csp_knn(edb, q, 1);
  check("1-NN", std::to_string(nn.front()), std::to_string(exp.nearest));
  std::cout << (mismatches == 0 ? "all values match\n" : std::to_string(mismatches) + " mismatches\n");
  return mismatches == 0 ? 0 : 1;
}

// ----------------------------------------------------------------- bench
struct BenchOpts {
  std::vector<std::size_t> dims{5, 10};
  std::vector<std::size_t> sizes{500, 1000};
  std::vector<std::string> schemes{"proposed", "baseline"};
  std::size_t reps = 1, k = 5;
  unsigned paillier_bits = 1024;
  std::string out;
  bool serial = false;
};

int cmd_bench(const BenchOpts& o, const Common& common) {
  harness::BenchConfig cfg;
  cfg.schemes.clear();
  for (const auto& s : o.schemes) cfg.schemes.push_back(harness::parse_scheme(s));
  cfg.dims = o.dims;
  cfg.sizes = o.sizes;
  cfg.repetitions = o.reps;
  cfg.k = o.k;
  cfg.paillier_bits = o.paillier_bits;
  cfg.seed = common.seed;
  cfg.exec = o.serial ? kernels::Exec::serial : kernels::Exec::parallel;
  if (o.out.empty()) {
    harness::bench(cfg, std::cout);
  } else {
    auto out = open_out(o.out);
    harness::bench(cfg, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure k-NN over encrypted databases: schemes, protocol harness and attacks"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed and --jobs work after the subcommand too
  Common common;
  bool seed_given = false;
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { common.seed = s, seed_given = true; },
         "RNG seed (default: $SKNN_SEED, else 1)")
      ->group("Global");
  app.add_option("--jobs", common.jobs, "OpenMP threads (0 = runtime default)")->group("Global");

  KeygenOpts kg;
  auto* keygen = app.add_subcommand("keygen", "generate a data owner key");
  keygen->add_option("--scheme", kg.scheme, "proposed or baseline")->capture_default_str();
  keygen->add_option("--dim,-d", kg.d, "data dimension");
  keygen->add_option("--c", kg.c, "split parameter");
  keygen->add_option("--epsilon", kg.epsilon, "padding parameter");
  keygen->add_option("--bound", kg.bound, "largest plaintext coordinate (integerized)")->capture_default_str();
  keygen->add_option("--data-scale", kg.data_scale)->capture_default_str();
  keygen->add_option("--matrix-scale", kg.matrix_scale)->capture_default_str();
  keygen->add_option("--query-scale", kg.query_scale)->capture_default_str();
  keygen->add_option("--alpha-form", kg.alpha_form, "per-coordinate or scalar")->capture_default_str();
  keygen->add_option("--mode", kg.mode, "baseline: integerized or real")->capture_default_str();
  keygen->add_flag("--toy", kg.toy, "write the fixed worked-example key");
  keygen->add_option("--out,-o", kg.out, "key file (default stdout)");

  DbOpts enc;
  auto* encrypt_db = app.add_subcommand("encrypt-db", "encrypt a CSV database");
  encrypt_db->add_option("--key", enc.key)->required();
  encrypt_db->add_option("--in", enc.in, "plaintext CSV")->required();
  encrypt_db->add_option("--out", enc.out, "encrypted JSON-lines file")->required();

  DbOpts dec;
  auto* decrypt_db = app.add_subcommand("decrypt-db", "decrypt an encrypted database to CSV");
  decrypt_db->add_option("--key", dec.key)->required();
  decrypt_db->add_option("--in", dec.in, "encrypted JSON-lines file")->required();
  decrypt_db->add_option("--out", dec.out, "plaintext CSV")->required();

  QueryOpts qo;
  auto* query = app.add_subcommand("query", "run one k-NN query session");
  query->add_option("--key", qo.key)->required();
  query->add_option("--db", qo.db, "encrypted JSON-lines file")->required();
  query->add_option("--point", qo.point, "query coordinates, e.g. 3,9")->required();
  query->add_option("--k", qo.k)->capture_default_str();
  query->add_option("--paillier-bits", qo.paillier_bits)->capture_default_str();
  query->add_option("--transcript", qo.transcript, "write the session as JSON lines");
  query->add_flag("--deny", qo.deny, "data owner refuses the query");
  query->add_flag("--toy", qo.toy, "replay the worked example's random draws");

  AttackOpts ao;
  auto* attack = app.add_subcommand("attack", "run an attack on a generated instance");
  attack->add_option("kind", ao.kind, "level1, level2, query-recovery or resistance")
      ->required()
      ->check(CLI::IsMember({"level1", "level2", "query-recovery", "resistance"}));
  attack->add_option("--dim,-d", ao.d)->capture_default_str();
  attack->add_option("--m", ao.m, "database size")->capture_default_str();
  attack->add_option("--known", ao.known, "known plaintexts (level2)")->capture_default_str();
  attack->add_option("--c", ao.c)->capture_default_str();
  attack->add_option("--epsilon", ao.epsilon)->capture_default_str();
  attack->add_option("--bound", ao.bound)->capture_default_str();
  attack->add_option("--n", ao.n, "level-1 multiplier N");
  attack->add_option("--trials", ao.trials, "resistance trials")->capture_default_str();
  attack->add_option("--case", ao.probe, "zero, unit or scaled-unit")->capture_default_str();
  attack->add_option("--paillier-bits", ao.paillier_bits)->capture_default_str();
  attack->add_option("--report", ao.report, "write the report JSON here");
  attack->add_flag("--json", ao.json_out, "print the report JSON instead of the table");

  auto* demo = app.add_subcommand("demo-toy", "reproduce the worked two-point example");

  BenchOpts bo;
  auto* benchc = app.add_subcommand("bench", "time each phase and print CSV");
  benchc->add_option("--dims", bo.dims)->delimiter(',')->capture_default_str();
  benchc->add_option("--sizes", bo.sizes)->delimiter(',')->capture_default_str();
  benchc->add_option("--schemes", bo.schemes)->delimiter(',')->capture_default_str();
  benchc->add_option("--reps", bo.reps)->capture_default_str();
  benchc->add_option("--k", bo.k)->capture_default_str();
  benchc->add_option("--paillier-bits", bo.paillier_bits)->capture_default_str();
  benchc->add_option("--out", bo.out, "CSV file (default stdout)");
  benchc->add_flag("--serial", bo.serial, "use the serial kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (!seed_given) common.seed = default_seed();
    if (common.jobs > 0) omp_set_num_threads(common.jobs);
    if (*keygen) return cmd_keygen(kg, common);
    if (*encrypt_db) return cmd_encrypt_db(enc, common);
    if (*decrypt_db) return cmd_decrypt_db(dec);
    if (*query) return cmd_query(qo, common);
    if (*attack) return cmd_attack(ao, common);
    if (*demo) return cmd_demo_toy(common);
    if (*benchc) return cmd_bench(bo, common);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const AttackInconclusive& e) {
    std::cerr << "attack inconclusive: " << e.what() << '\n';
    return kInconclusive;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}
