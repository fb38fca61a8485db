#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kinlyap/cli/config.hpp"
#include "kinlyap/cli/driver.hpp"

namespace kinlyap::cli {

struct PresetRun {
  RunConfig config;
  std::string label;  // legend text
  bool dashed = false;
};

// The three coplanar reproductions, U = 1 and f_e = (0.4, 0.3, 0.2, 0.6),
// initial state (1,1,1,1), t_final = 5:
//   sim1  explicit, trivial law, N in {10, 20, 40, 80}, dt auto
//   sim2  explicit, N = 20, dt = 0.01, laws trivial / gain45(1) / gain46(1,1)
//   sim3  implicit at sigma in {1, 0.1, 0.02} and explicit at sigma = 0.02,
//         N = 10, dt = 0.05, trivial law
// Outputs go to outdir/<name>.{trace.csv,summary.json,svg}. Runs whose dt
// is outside the certified range carry force = true.
std::vector<PresetRun> preset_runs(const std::string& name, const std::filesystem::path& outdir);

struct PropertyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproduceReport {
  std::string name;
  std::vector<RunSummary> runs;
  std::vector<PropertyCheck> checks;

  bool all_passed() const;
};

// Runs a preset, writes every per-run output plus outdir/<name>.svg (all
// traces on one plot) and outdir/<name>.report.json.
ReproduceReport cmd_reproduce(const std::string& name, const std::filesystem::path& outdir);

}  // namespace kinlyap::cli
