#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kinlyap/boundary.hpp"
#include "kinlyap/certify.hpp"
#include "kinlyap/linalg.hpp"
#include "kinlyap/model.hpp"
#include "kinlyap/structure.hpp"

namespace kinlyap::cli {

inline constexpr int kConfigSchemaVersion = 1;

struct ModelSpec {
  bool coplanar = true;
  CoplanarSteadyState state{1.0, {0.4, 0.3, 0.2, 0.6}};
  double sigma = 1.0;
  // generic models only
  Matrix velocities;
  Matrix collision;
  std::vector<double> lambda0;

  KineticModel build() const;
  std::vector<double> build_lambda0() const;
};

struct LawSpec {
  std::string kind = "trivial";  // trivial | gain45 | gain46 | linear
  double k = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  std::filesystem::path matrix_csv;
};

std::shared_ptr<const BoundaryLaw> make_law(const LawSpec& spec);

struct OutputSpec {
  std::optional<std::filesystem::path> trace_csv;
  std::optional<std::filesystem::path> summary_json;
  std::optional<std::filesystem::path> svg;
  std::optional<std::filesystem::path> snapshot_csv;
};

struct RunConfig {
  std::string name = "run";
  ModelSpec model;
  int N = 10;
  std::optional<double> dt;  // nullopt: auto, 0.9 times the certified maximum
  std::optional<double> t_final;
  std::optional<long> steps;
  SchemeKind scheme = SchemeKind::Explicit;
  LawSpec law;
  std::vector<double> initial;  // constant initial state; empty means all ones
  OutputSpec outputs;
  bool force = false;
  long record_every = 1;
  bool check_decay = false;
};

// Parses a config object. Relative paths are resolved against base_dir.
// Unknown keys, wrong types and missing fields throw ConfigError.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);

}  // namespace kinlyap::cli
