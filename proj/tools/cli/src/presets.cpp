#include "kinlyap/cli/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "kinlyap/cli/svg.hpp"
#include "kinlyap/error.hpp"

namespace kinlyap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunConfig base_config(const std::string& name, const fs::path& outdir) {
  RunConfig c;
  c.name = name;
  c.model.coplanar = true;
  c.model.state = {1.0, {0.4, 0.3, 0.2, 0.6}};
  c.model.sigma = 1.0;
  c.t_final = 5.0;
  c.initial = {1.0, 1.0, 1.0, 1.0};
  c.outputs.trace_csv = outdir / (name + ".trace.csv");
  c.outputs.summary_json = outdir / (name + ".summary.json");
  c.outputs.svg = outdir / (name + ".svg");
  return c;
}

std::string sigma_tag(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", s);
  return buf;
}

// Marks a run forced when its fixed dt is outside the certified range.
void force_if_uncertified(RunConfig& c) {
  const auto cert = cmd_certify(c).certificate;
  c.force = *c.dt > cert.dt_max();
}

double log_final(const RunSummary& s) { return std::log(s.final_l2); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<PropertyCheck> sim1_checks(const std::vector<RunSummary>& runs) {
  std::vector<PropertyCheck> out;
  PropertyCheck dec{"traces strictly decreasing after the first step", true, ""};
  for (const auto& r : runs) {
    for (std::size_t i = 2; i < r.trace.size(); ++i) {
      if (!(r.trace[i].l2 < r.trace[i - 1].l2)) {
        dec.passed = false;
        dec.detail += r.name + " row " + std::to_string(i) + "; ";
        break;
      }
    }
  }
  out.push_back(dec);

  PropertyCheck close{"fitted rates pairwise within 15%", true, ""};
  PropertyCheck above{"every fitted rate at least the certified nu", true, ""};
  for (const auto& a : runs) {
    if (!a.fit) {
      close.passed = above.passed = false;
      continue;
    }
    close.detail += a.name + "=" + fmt(a.fit->rate) + " ";
    if (a.fit->rate < a.certify.certificate.nu) above.passed = false;
    for (const auto& b : runs) {
      if (!b.fit) continue;
      const double lo = std::min(a.fit->rate, b.fit->rate), hi = std::max(a.fit->rate, b.fit->rate);
      if (hi - lo > 0.15 * lo) close.passed = false;
    }
  }
  if (!runs.empty()) above.detail = "nu = " + fmt(runs.front().certify.certificate.nu);
  out.push_back(close);
  out.push_back(above);
  return out;
}

std::vector<PropertyCheck> sim2_checks(const std::vector<RunSummary>& runs) {
  std::vector<PropertyCheck> out;
  PropertyCheck order{"trivial law has the lowest final log-norm", true, ""};
  PropertyCheck decay{"every run decays below 0.1 of the initial norm", true, ""};
  const double trivial = log_final(runs.at(0));
  for (const auto& r : runs) {
    order.detail += r.name + "=" + fmt(log_final(r)) + " ";
    if (log_final(r) < trivial) order.passed = false;
    if (!(r.final_l2 < 0.1 * r.initial_l2) || r.diverged) decay.passed = false;
  }
  out.push_back(order);
  out.push_back(decay);
  return out;
}

std::vector<PropertyCheck> sim3_checks(const std::vector<RunSummary>& runs) {
  std::vector<PropertyCheck> out;
  PropertyCheck rates{"implicit rates strictly decrease with sigma", true, ""};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = runs.at(i);
    if (!r.fit || r.diverged || !(r.final_l2 < r.initial_l2)) {
      rates.passed = false;
      continue;
    }
    rates.detail += r.name + "=" + fmt(r.fit->rate) + " ";
    if (i > 0 && runs[i - 1].fit && !(r.fit->rate < runs[i - 1].fit->rate)) rates.passed = false;
  }
  out.push_back(rates);

  PropertyCheck blow{"explicit sigma = 0.02 reaches 10x the initial norm within 200 steps", false,
                     ""};
  const auto& e = runs.at(3);
  for (const auto& d : e.trace) {
    if (d.n <= 200 && d.l2 >= 10.0 * e.initial_l2) {
      blow.passed = true;
      blow.detail = "step " + std::to_string(d.n);
      break;
    }
  }
  out.push_back(blow);
  return out;
}

}  // namespace

std::vector<PresetRun> preset_runs(const std::string& name, const fs::path& outdir) {
  std::vector<PresetRun> runs;
  if (name == "sim1") {
    for (int n : {10, 20, 40, 80}) {
      RunConfig c = base_config("sim1_N" + std::to_string(n), outdir);
      c.N = n;
      c.scheme = SchemeKind::Explicit;
      const double dt = 0.9 * cmd_certify(c).certificate.dt_max();
      const long steps = static_cast<long>(std::ceil(*c.t_final / dt));
      c.record_every = std::max<long>(1, steps / 1000);
      runs.push_back({c, "N = " + std::to_string(n), false});
    }
  } else if (name == "sim2") {
    const std::pair<const char*, LawSpec> laws[] = {
        {"trivial", LawSpec{"trivial", 0, 0, 0, {}}},
        {"gain45", LawSpec{"gain45", 1.0, 0, 0, {}}},
        {"gain46", LawSpec{"gain46", 0, 1.0, 1.0, {}}},
    };
    const char* labels[] = {"trivial", "gain45 k = 1", "gain46 k1 = k2 = 1"};
    for (std::size_t i = 0; i < 3; ++i) {
      RunConfig c = base_config(std::string("sim2_") + laws[i].first, outdir);
      c.N = 20;
      c.dt = 0.01;
      c.scheme = SchemeKind::Explicit;
      c.law = laws[i].second;
      force_if_uncertified(c);
      runs.push_back({c, labels[i], false});
    }
  } else if (name == "sim3") {
    for (double sigma : {1.0, 0.1, 0.02}) {
      RunConfig c = base_config("sim3_implicit_sigma" + sigma_tag(sigma), outdir);
      c.model.sigma = sigma;
      c.N = 10;
      c.dt = 0.05;
      c.scheme = SchemeKind::Implicit;
      force_if_uncertified(c);
      runs.push_back({c, "implicit sigma = " + sigma_tag(sigma), false});
    }
    RunConfig c = base_config("sim3_explicit_sigma0.02", outdir);
    c.model.sigma = 0.02;
    c.N = 10;
    c.dt = 0.05;
    c.scheme = SchemeKind::Explicit;
    force_if_uncertified(c);
    runs.push_back({c, "explicit sigma = 0.02", true});
  } else {
    throw Error(ErrorCode::ConfigError, "unknown preset '" + name + "' (sim1, sim2, sim3)");
  }
  return runs;
}

bool ReproduceReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ReproduceReport cmd_reproduce(const std::string& name, const fs::path& outdir) {
  const auto presets = preset_runs(name, outdir);
  fs::create_directories(outdir);
  ReproduceReport report;
  report.name = name;
  std::vector<Series> series;
  for (const auto& p : presets) {
    {
      std::ofstream cfg(outdir / (p.config.name + ".config.json"));
      cfg << to_json(p.config).dump(2) << '\n';
    }
    report.runs.push_back(cmd_run(p.config));
    Series s{p.label, {}, {}, p.dashed};
    for (const auto& d : report.runs.back().trace) {
      s.x.push_back(d.t);
      s.y.push_back(std::log(d.l2));
    }
    series.push_back(std::move(s));
  }
  if (name == "sim1") report.checks = sim1_checks(report.runs);
  if (name == "sim2") report.checks = sim2_checks(report.runs);
  if (name == "sim3") report.checks = sim3_checks(report.runs);

  write_svg_plot(outdir / (name + ".svg"), name, "t", "log l2", series);
  json j;
  j["preset"] = name;
  j["runs"] = json::array();
  for (const auto& r : report.runs) {
    j["runs"].push_back({{"name", r.name},
                         {"rate", r.fit ? json(r.fit->rate) : json(nullptr)},
                         {"final_l2", r.final_l2},
                         {"diverged", r.diverged},
                         {"certified", r.certified}});
  }
  j["checks"] = json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  std::ofstream(outdir / (name + ".report.json")) << j.dump(2) << '\n';
  return report;
}

}  // namespace kinlyap::cli
