#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kinlyap/cli/config.hpp"
#include "kinlyap/cli/driver.hpp"
#include "kinlyap/cli/presets.hpp"
#include "kinlyap/cli/validate.hpp"
#include "kinlyap/error.hpp"

namespace {

using namespace kinlyap::cli;

int certify(const std::string& config_path, const std::string& out_path) {
  const auto report = cmd_certify(load_config(config_path));
  const std::string text = certify_report_json(report).dump(2);
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) throw kinlyap::Error(kinlyap::ErrorCode::IoError, "cannot write " + out_path);
    out << text << '\n';
  }
  return 0;
}

int run(const std::string& config_path, bool force) {
  const auto s = cmd_run(load_config(config_path), RunOverrides{force});
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
  std::printf("%s: %ld/%ld steps, dt = %.6g, final l2 = %.6g", s.name.c_str(), s.steps_taken,
              s.steps_planned, s.dt, s.final_l2);
  if (s.fit) std::printf(", rate = %.6g (r2 = %.4f)", s.fit->rate, s.fit->r2);
  std::printf("%s, %.2f s\n", s.diverged ? ", DIVERGED" : "", s.wall_time_s);
  if (s.decay_checked > 0) {
    std::printf("per-step contraction: %ld of %ld steps failed\n", s.decay_failed, s.decay_checked);
  }
  return 0;
}

int reproduce(const std::string& preset, const std::string& outdir) {
  const auto report = cmd_reproduce(preset, outdir);
  for (const auto& r : report.runs) {
    std::printf("  %-28s final l2 %-12.6g rate %-12s%s\n", r.name.c_str(), r.final_l2,
                r.fit ? std::to_string(r.fit->rate).c_str() : "n/a", r.diverged ? " diverged" : "");
  }
  for (const auto& c : report.checks) {
    std::printf("%s  %s  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  return report.all_passed() ? 0 : 2;
}

int validate(const ValidationOptions& opts) {
  bool ok = true;
  for (const auto& c : cmd_validate(opts)) {
    std::printf("%s  %-26s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    ok = ok && c.passed;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov-certified upwind splitting for discrete-velocity kinetic models"};
  app.require_subcommand(1);

  std::string config_path, out_path, preset, outdir = "out";
  bool force = false;
  ValidationOptions vopts;

  auto* c = app.add_subcommand("certify", "Print the stability certificate for a config");
  c->add_option("-c,--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  c->add_option("-o,--output", out_path, "Write the certificate JSON here instead of stdout");

  auto* r = app.add_subcommand("run", "Run a configured simulation");
  r->add_option("-c,--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  r->add_flag("--force", force, "Allow a time step outside the certified range");

  auto* p = app.add_subcommand("reproduce", "Run a reproduction preset and check its properties");
  p->add_option("preset", preset, "sim1, sim2 or sim3")
      ->required()
      ->check(CLI::IsMember({"sim1", "sim2", "sim3"}));
  p->add_option("-o,--outdir", outdir, "Output directory");

  auto* v = app.add_subcommand("validate", "Run the invariant suite");
  v->add_option("--mutate-q", vopts.q_asymmetry, "Add random noise of this size to Q");
  v->add_flag("--drop-incoming-shift", vopts.drop_incoming_shift,
              "Drop the exp(-|lambda| dx) factor from incoming boundary weights");
  v->add_option("--seed", vopts.seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c) return certify(config_path, out_path);
    if (*r) return run(config_path, force);
    if (*p) return reproduce(preset, outdir);
    if (*v) return validate(vopts);
  } catch (const std::exception& e) {
    std::cerr << "kinlyap: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
