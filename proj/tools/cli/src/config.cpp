#include "kinlyap/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "kinlyap/error.hpp"

namespace kinlyap::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail("missing key '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) fail(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(what + " must be finite");
  return x;
}

long integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) fail(what + " must be an integer");
  return v.get<long>();
}

std::vector<double> vector_of(const json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix matrix_of(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) fail(what + " must be a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  Matrix m(v.size(), cols);
  for (std::size_t r = 0; r < v.size(); ++r) {
    const auto row = vector_of(v[r], what + "[" + std::to_string(r) + "]");
    if (row.size() != cols) fail(what + " rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

fs::path resolve(const fs::path& base, const json& v, const std::string& what) {
  if (!v.is_string()) fail(what + " must be a string path");
  fs::path p = v.get<std::string>();
  return p.is_relative() && !base.empty() ? base / p : p;
}

ModelSpec parse_model(const json& j) {
  only_keys(j, "model", {"coplanar", "generic"});
  if (j.size() != 1) fail("model needs exactly one of 'coplanar' or 'generic'");
  ModelSpec m;
  if (j.contains("coplanar")) {
    const json& c = j.at("coplanar");
    only_keys(c, "model.coplanar", {"U", "f_e", "sigma"});
    m.coplanar = true;
    m.state.speed = number(require(c, "model.coplanar", "U"), "U");
    const auto fe = vector_of(require(c, "model.coplanar", "f_e"), "f_e");
    if (fe.size() != 4) fail("f_e needs four densities");
    for (int i = 0; i < 4; ++i) m.state.density[i] = fe[i];
    m.sigma = c.contains("sigma") ? number(c.at("sigma"), "sigma") : 1.0;
  } else {
    const json& g = j.at("generic");
    only_keys(g, "model.generic", {"velocities", "Q", "sigma", "lambda0"});
    m.coplanar = false;
    m.velocities = matrix_of(require(g, "model.generic", "velocities"), "velocities");
    m.collision = matrix_of(require(g, "model.generic", "Q"), "Q");
    m.sigma = g.contains("sigma") ? number(g.at("sigma"), "sigma") : 1.0;
    if (g.contains("lambda0")) {
      m.lambda0 = vector_of(g.at("lambda0"), "lambda0");
    } else {
      m.lambda0.assign(m.velocities.rows(), 1.0);
    }
  }
  return m;
}

LawSpec parse_law(const json& j, const fs::path& base) {
  if (!j.is_object()) fail("law must be an object");
  const std::string kind = require(j, "law", "law").is_string() ? j.at("law").get<std::string>() : "";
  LawSpec s;
  s.kind = kind;
  if (kind == "trivial") {
    only_keys(j, "law", {"law"});
  } else if (kind == "gain45") {
    only_keys(j, "law", {"law", "k"});
    s.k = number(require(j, "law", "k"), "k");
  } else if (kind == "gain46") {
    only_keys(j, "law", {"law", "k1", "k2"});
    s.k1 = number(require(j, "law", "k1"), "k1");
    s.k2 = number(require(j, "law", "k2"), "k2");
  } else if (kind == "linear") {
    only_keys(j, "law", {"law", "matrix_csv"});
    s.matrix_csv = resolve(base, require(j, "law", "matrix_csv"), "matrix_csv");
  } else {
    fail("law must be one of trivial, gain45, gain46, linear");
  }
  return s;
}

}  // namespace

KineticModel ModelSpec::build() const {
  if (coplanar) return coplanar_model(state, sigma);
  return KineticModel(velocities, collision, sigma);
}

std::vector<double> ModelSpec::build_lambda0() const {
  return coplanar ? coplanar_lambda0(state) : lambda0;
}

std::shared_ptr<const BoundaryLaw> make_law(const LawSpec& spec) {
  if (spec.kind == "trivial") return std::make_shared<TrivialLaw>();
  if (spec.kind == "gain45") return std::make_shared<CoplanarGain45Law>(spec.k);
  if (spec.kind == "gain46") return std::make_shared<CoplanarGain46Law>(spec.k1, spec.k2);
  if (spec.kind == "linear") {
    std::ifstream in(spec.matrix_csv);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + spec.matrix_csv.string());
    return std::make_shared<GeneralLinearLaw>(read_sparse_triplets(in));
  }
  fail("unknown law '" + spec.kind + "'");
}

RunConfig parse_config(const json& j, const fs::path& base) {
  only_keys(j, "config",
            {"schema", "name", "model", "N", "dt", "t_final", "steps", "scheme", "law", "initial",
             "outputs", "force", "record_every", "check_decay"});
  if (integer(require(j, "config", "schema"), "schema") != kConfigSchemaVersion) {
    fail("unsupported schema version (expected 1)");
  }
  RunConfig c;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) fail("name must be a string");
    c.name = j.at("name").get<std::string>();
  }
  c.model = parse_model(require(j, "config", "model"));
  c.N = static_cast<int>(integer(require(j, "config", "N"), "N"));
  if (c.N < 2) fail("N must be at least 2");

  if (j.contains("dt")) {
    const json& dt = j.at("dt");
    if (dt.is_string()) {
      if (dt.get<std::string>() != "auto") fail("dt must be a positive number or \"auto\"");
    } else {
      c.dt = number(dt, "dt");
      if (!(*c.dt > 0.0)) fail("dt must be positive");
    }
  }
  if (j.contains("t_final") == j.contains("steps")) fail("give exactly one of t_final and steps");
  if (j.contains("t_final")) {
    c.t_final = number(j.at("t_final"), "t_final");
    if (*c.t_final < 0.0) fail("t_final must be non-negative");
  } else {
    c.steps = integer(j.at("steps"), "steps");
    if (*c.steps < 0) fail("steps must be non-negative");
  }
  if (j.contains("scheme")) {
    const json& s = j.at("scheme");
    if (s == "explicit") c.scheme = SchemeKind::Explicit;
    else if (s == "implicit") c.scheme = SchemeKind::Implicit;
    else fail("scheme must be \"explicit\" or \"implicit\"");
  }
  if (j.contains("law")) c.law = parse_law(j.at("law"), base);
  if (j.contains("initial")) c.initial = vector_of(j.at("initial"), "initial");
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    only_keys(o, "outputs", {"trace_csv", "summary_json", "svg", "snapshot_csv"});
    if (o.contains("trace_csv")) c.outputs.trace_csv = resolve(base, o.at("trace_csv"), "trace_csv");
    if (o.contains("summary_json"))
      c.outputs.summary_json = resolve(base, o.at("summary_json"), "summary_json");
    if (o.contains("svg")) c.outputs.svg = resolve(base, o.at("svg"), "svg");
    if (o.contains("snapshot_csv"))
      c.outputs.snapshot_csv = resolve(base, o.at("snapshot_csv"), "snapshot_csv");
  }
  if (j.contains("force")) {
    if (!j.at("force").is_boolean()) fail("force must be a boolean");
    c.force = j.at("force").get<bool>();
  }
  if (j.contains("record_every")) {
    c.record_every = integer(j.at("record_every"), "record_every");
    if (c.record_every < 1) fail("record_every must be at least 1");
  }
  if (j.contains("check_decay")) {
    if (!j.at("check_decay").is_boolean()) fail("check_decay must be a boolean");
    c.check_decay = j.at("check_decay").get<bool>();
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json to_json(const RunConfig& c) {
  json j;
  j["schema"] = kConfigSchemaVersion;
  j["name"] = c.name;
  if (c.model.coplanar) {
    const auto& f = c.model.state.density;
    j["model"]["coplanar"] = {{"U", c.model.state.speed},
                              {"f_e", {f[0], f[1], f[2], f[3]}},
                              {"sigma", c.model.sigma}};
  } else {
    auto rows = [](const Matrix& m) {
      json a = json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        a.push_back(std::vector<double>(row.begin(), row.end()));
      }
      return a;
    };
    j["model"]["generic"] = {{"velocities", rows(c.model.velocities)},
                             {"Q", rows(c.model.collision)},
                             {"sigma", c.model.sigma},
                             {"lambda0", c.model.lambda0}};
  }
  j["N"] = c.N;
  if (c.dt) j["dt"] = *c.dt;
  else j["dt"] = "auto";
  if (c.t_final) j["t_final"] = *c.t_final;
  if (c.steps) j["steps"] = *c.steps;
  j["scheme"] = std::string(to_string(c.scheme));
  json law{{"law", c.law.kind}};
  if (c.law.kind == "gain45") law["k"] = c.law.k;
  if (c.law.kind == "gain46") {
    law["k1"] = c.law.k1;
    law["k2"] = c.law.k2;
  }
  if (c.law.kind == "linear") law["matrix_csv"] = c.law.matrix_csv.string();
  j["law"] = law;
  if (!c.initial.empty()) j["initial"] = c.initial;
  json out = json::object();
  if (c.outputs.trace_csv) out["trace_csv"] = c.outputs.trace_csv->string();
  if (c.outputs.summary_json) out["summary_json"] = c.outputs.summary_json->string();
  if (c.outputs.svg) out["svg"] = c.outputs.svg->string();
  if (c.outputs.snapshot_csv) out["snapshot_csv"] = c.outputs.snapshot_csv->string();
  if (!out.empty()) j["outputs"] = out;
  j["force"] = c.force;
  j["record_every"] = c.record_every;
  j["check_decay"] = c.check_decay;
  return j;
}

}  // namespace kinlyap::cli
