#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinlyap/certify.hpp"
#include "kinlyap/cli/config.hpp"
#include "kinlyap/lyapunov.hpp"
#include "kinlyap/structure.hpp"

namespace kinlyap::cli {

// Divergence guard: a run stops once ||f^n|| exceeds this multiple of ||f^0||.
inline constexpr double kDivergenceFactor = 1e12;

struct CertifyReport {
  StabilityCertificate certificate;
  StructuralDecomposition decomposition;
  DecompositionResiduals residuals;
  std::optional<double> gain45_bound;  // coplanar models only
  std::optional<Gain46Bounds> gain46_bounds;
};

CertifyReport cmd_certify(const RunConfig& config);

// Flat certificate object; an infinite dt_source is written as null with
// "unbounded": true.
nlohmann::json certificate_json(const StabilityCertificate& cert);
nlohmann::json certify_report_json(const CertifyReport& report);

struct RunSummary {
  std::string name;
  CertifyReport certify;
  double dt = 0.0;
  long steps_planned = 0;
  long steps_taken = 0;
  bool certified = false;  // dt within every certified bound
  std::optional<DecayFit> fit;
  double initial_l2 = 0.0;
  double final_l2 = 0.0;
  double initial_L = 0.0;
  bool diverged = false;
  double B_min = 0.0;
  double B_max = 0.0;
  long B_positive_steps = 0;
  long decay_checked = 0;  // steps tested against the per-step contraction
  long decay_failed = 0;
  bool envelope_ok = true;
  double wall_time_s = 0.0;
  std::vector<std::string> warnings;
  std::vector<StepDiagnostics> trace;  // recorded rows
};

struct RunOverrides {
  bool force = false;  // OR-ed with the config's force flag
};

// Runs the configured simulation and writes every requested output.
RunSummary cmd_run(const RunConfig& config, const RunOverrides& overrides = {});

nlohmann::json summary_json(const RunSummary& summary);

// Trace CSV with header step,t,l2,log_l2,lyapunov,boundary_term.
void write_trace_csv(const std::filesystem::path& path, const std::vector<StepDiagnostics>& rows);
std::vector<StepDiagnostics> read_trace_csv(const std::filesystem::path& path);

}  // namespace kinlyap::cli
