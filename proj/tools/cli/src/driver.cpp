#include "kinlyap/cli/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "kinlyap/boundary.hpp"
#include "kinlyap/cli/svg.hpp"
#include "kinlyap/error.hpp"
#include "kinlyap/grid.hpp"
#include "kinlyap/scheme.hpp"

namespace kinlyap::cli {

using nlohmann::json;

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

long planned_steps(const RunConfig& c, double dt) {
  if (c.steps) return *c.steps;
  const double ratio = *c.t_final / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(ratio));
}

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

}  // namespace

CertifyReport cmd_certify(const RunConfig& config) {
  const KineticModel model = config.model.build();
  const auto lambda0 = config.model.build_lambda0();
  CertifyReport r;
  r.decomposition = decompose(model, lambda0);
  r.residuals = verify_decomposition(model, r.decomposition);
  r.certificate = certify(config.scheme, model, r.decomposition, Grid(model.dimension(), config.N).spacing());
  if (config.model.coplanar) {
    r.gain45_bound = admissible_gain_45(r.certificate.alpha, config.model.state);
    r.gain46_bounds = admissible_gains_46(r.certificate.alpha, config.model.state);
  }
  return r;
}

json certificate_json(const StabilityCertificate& c) {
  json j;
  j["scheme_kind"] = std::string(to_string(c.scheme_kind));
  j["sigma"] = c.sigma;
  j["dx"] = c.dx;
  j["M"] = c.M;
  j["m"] = c.m;
  j["lambda_M"] = c.lambda_M;
  j["lambda_m"] = c.lambda_m;
  j["lambda_min"] = c.lambda_min;
  j["norm_P"] = c.norm_P;
  j["norm_Q_scaled"] = c.norm_Q_scaled;
  j["mu"] = c.mu;
  j["mu1"] = c.mu1();
  j["C1"] = c.C1;
  j["C2"] = c.C2;
  j["M_tilde"] = c.M_tilde ? json(*c.M_tilde) : json(nullptr);
  j["C3"] = c.C3 ? json(*c.C3) : json(nullptr);
  j["epsilon"] = c.epsilon;
  j["alpha"] = c.alpha;
  j["dt_cfl"] = c.dt_cfl;
  if (c.dt_source) {
    j["dt_source"] = finite_or_null(*c.dt_source);
    j["unbounded"] = !std::isfinite(*c.dt_source);
  } else {
    j["dt_source"] = nullptr;
    j["unbounded"] = false;
  }
  j["dt_max"] = c.dt_max();
  j["nu"] = c.nu;
  j["C_amp"] = c.C_amp;
  return j;
}

json certify_report_json(const CertifyReport& r) {
  json j = certificate_json(r.certificate);
  j["rank"] = r.decomposition.rank;
  j["lambda"] = r.decomposition.lambda;
  j["lambda0"] = r.decomposition.lambda0;
  j["residuals"] = {{"similarity", r.residuals.similarity},
                    {"congruence", r.residuals.congruence},
                    {"inverse", r.residuals.inverse}};
  j["coupling_bounds"] =
      "C1, C2: supremum over the closed unit cube on a 17-point-per-axis lattice, inflated by 5%";
  if (r.gain45_bound) j["admissible_gain_45"] = *r.gain45_bound;
  if (r.gain46_bounds) {
    j["admissible_gains_46"] = {{"k1max", r.gain46_bounds->k1max},
                                {"k2max", r.gain46_bounds->k2max}};
  }
  return j;
}

RunSummary cmd_run(const RunConfig& config, const RunOverrides& overrides) {
  const auto start = std::chrono::steady_clock::now();
  const bool force = config.force || overrides.force;

  RunSummary s;
  s.name = config.name;
  s.certify = cmd_certify(config);
  const StabilityCertificate& cert = s.certify.certificate;
  const KineticModel model = config.model.build();
  const auto lambda0 = config.model.build_lambda0();
  const Grid grid(model.dimension(), config.N);
  const int kk = model.components();

  const double dt = config.dt ? *config.dt : 0.9 * cert.dt_max();
  s.dt = dt;
  const bool cfl_ok = dt <= cert.dt_cfl * (1.0 + 1e-12);
  const bool source_ok = !cert.dt_source || dt <= *cert.dt_source;
  s.certified = cfl_ok && source_ok;
  if (!cfl_ok && !force) {
    throw Error(ErrorCode::CflViolation,
                "dt = " + fmt17(dt) + " exceeds dt_cfl = " + fmt17(cert.dt_cfl) + " (use --force)");
  }
  if (!source_ok && !force) {
    throw Error(ErrorCode::UncertifiedTimeStep, "dt = " + fmt17(dt) + " exceeds dt_source = " +
                                                    fmt17(*cert.dt_source) + " (use --force)");
  }
  if (!s.certified) {
    s.warnings.push_back("dt = " + fmt17(dt) + " is outside the certified range (max " +
                         fmt17(cert.dt_max()) + "); running under force");
  }
  if (config.law.kind == "gain45" && s.certify.gain45_bound &&
      std::abs(config.law.k) > *s.certify.gain45_bound) {
    s.warnings.push_back("gain k = " + fmt17(config.law.k) + " exceeds the sufficient bound " +
                         fmt17(*s.certify.gain45_bound) + "; B <= 0 is not certified");
  }
  if (config.law.kind == "gain46" && s.certify.gain46_bounds &&
      (std::abs(config.law.k1) > s.certify.gain46_bounds->k1max ||
       std::abs(config.law.k2) > s.certify.gain46_bounds->k2max)) {
    s.warnings.push_back("gains (" + fmt17(config.law.k1) + ", " + fmt17(config.law.k2) +
                         ") exceed the sufficient bounds (" +
                         fmt17(s.certify.gain46_bounds->k1max) + ", " +
                         fmt17(s.certify.gain46_bounds->k2max) + "); B <= 0 is not certified");
  }

  std::vector<double> initial = config.initial;
  if (initial.empty()) initial.assign(kk, 1.0);
  if (static_cast<int>(initial.size()) != kk) {
    throw Error(ErrorCode::ConfigError, "initial state needs one value per component");
  }
  Field f(grid, kk);
  for (int k = 0; k < kk; ++k) {
    auto comp = f.component(k);
    std::fill(comp.begin(), comp.end(), initial[k]);
  }

  const auto law = make_law(config.law);
  StepOptions opts;
  opts.allow_cfl_violation = force;
  opts.threads = threads_from_env();
  SplitStepper stepper(model, law, grid, dt, config.scheme, opts);
  const auto& layout = stepper.layout();
  const LyapunovFunctional lyap(model, layout, lambda0, cert.alpha);
  OutgoingTrace out_trace(layout);
  FaceTrace in_trace(layout);

  const long steps = planned_steps(config, dt);
  s.steps_planned = steps;
  s.initial_l2 = l2_norm(f);
  s.initial_L = lyap.value(f);
  const double mu1 = cert.mu1();

  s.B_min = std::numeric_limits<double>::infinity();
  s.B_max = -std::numeric_limits<double>::infinity();
  auto observe_B = [&](double b) {
    s.B_min = std::min(s.B_min, b);
    s.B_max = std::max(s.B_max, b);
  };
  auto boundary_now = [&]() {
    extract_outgoing(f, out_trace);
    law->apply(out_trace, f.step(), in_trace);
    return lyap.boundary_term(out_trace, in_trace);
  };
  double last_recorded_L = s.initial_L;
  auto push_row = [&](long n, double l2, double L, double B) {
    StepDiagnostics d;
    d.n = n;
    d.t = static_cast<double>(n) * dt;
    d.l2 = l2;
    d.L = L;
    d.B = B;
    d.per_step_ratio = s.trace.empty() || last_recorded_L == 0.0 ? 1.0 : L / last_recorded_L;
    d.bound_ok = within_envelope(l2, s.initial_l2, d.t, cert);
    s.envelope_ok = s.envelope_ok && d.bound_ok;
    last_recorded_L = L;
    s.trace.push_back(d);
  };

  const bool watch = !s.certified;
  double L_cur = s.initial_L;
  long n = 0;
  for (;;) {
    const bool last = n == steps;
    const bool record = last || n % config.record_every == 0;
    double l2 = 0.0, L = 0.0;
    if (record) {
      l2 = l2_norm(f);
      L = config.check_decay ? L_cur : lyap.value(f);
    }
    double B;
    if (!last) {
      stepper.step(f);
      B = lyap.boundary_term(stepper.last_outgoing(), stepper.last_incoming());
    } else {
      B = boundary_now();
    }
    observe_B(B);
    if (B > 0.0) ++s.B_positive_steps;
    if (record) {
      push_row(n, l2, L, B);
      if (!(l2 <= kDivergenceFactor * s.initial_l2)) {
        s.diverged = true;
        break;
      }
    }
    if (last) break;
    ++n;

    if (config.check_decay) {
      const double L_next = lyap.value(f);
      ++s.decay_checked;
      if (!assert_per_step_decay(L_cur, L_next, s.initial_L, mu1, dt)) ++s.decay_failed;
      L_cur = L_next;
    }
    if (watch && n != steps && n % config.record_every != 0) {
      const double l2n = l2_norm(f);
      if (!(l2n <= kDivergenceFactor * s.initial_l2)) {
        s.diverged = true;
        const double b = boundary_now();
        observe_B(b);
        push_row(n, l2n, lyap.value(f), b);
        break;
      }
    }
  }
  s.steps_taken = n;
  s.final_l2 = s.trace.back().l2;
  if (s.diverged) {
    s.warnings.push_back("run diverged at step " + std::to_string(n) + ": l2 exceeded " +
                         fmt17(kDivergenceFactor) + " times the initial norm");
  }

  std::vector<double> ts, ls;
  for (const auto& d : s.trace) {
    ts.push_back(d.t);
    ls.push_back(d.l2);
  }
  try {
    s.fit = fit_decay_rate(ts, ls);
  } catch (const Error& e) {
    s.warnings.push_back(std::string("rate fit skipped: ") + e.what());
  }
  s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const OutputSpec& o = config.outputs;
  if (o.trace_csv) write_trace_csv(*o.trace_csv, s.trace);
  if (o.snapshot_csv) {
    ensure_parent(*o.snapshot_csv);
    std::ofstream snap(*o.snapshot_csv);
    if (!snap) throw Error(ErrorCode::IoError, "cannot write " + o.snapshot_csv->string());
    write_snapshot_csv(snap, f);
  }
  if (o.svg) {
    Series series{config.name, {}, {}, false};
    for (const auto& d : s.trace) {
      if (d.l2 > 0.0) {
        series.x.push_back(d.t);
        series.y.push_back(std::log(d.l2));
      }
    }
    write_svg_plot(*o.svg, config.name, "t", "log l2", {series});
  }
  if (o.summary_json) {
    ensure_parent(*o.summary_json);
    std::ofstream js(*o.summary_json);
    if (!js) throw Error(ErrorCode::IoError, "cannot write " + o.summary_json->string());
    json j = summary_json(s);
    j["config"] = to_json(config);
    js << j.dump(2) << '\n';
  }
  return s;
}

json summary_json(const RunSummary& s) {
  json j;
  j["schema"] = kConfigSchemaVersion;
  j["name"] = s.name;
  j["certificate"] = certify_report_json(s.certify);
  j["dt"] = s.dt;
  j["steps_planned"] = s.steps_planned;
  j["steps_taken"] = s.steps_taken;
  j["certified"] = s.certified;
  if (s.fit) {
    j["rate"] = s.fit->rate;
    j["r2"] = s.fit->r2;
    j["fit_window"] = {{"first_row", s.fit->first},
                       {"rows", s.fit->samples},
                       {"t_start", s.trace[s.fit->first].t},
                       {"rule", "trailing half of the recorded rows"}};
  } else {
    j["rate"] = nullptr;
    j["r2"] = nullptr;
  }
  j["initial_l2"] = s.initial_l2;
  j["final_l2"] = s.final_l2;
  j["diverged"] = s.diverged;
  j["B_min"] = finite_or_null(s.B_min);
  j["B_max"] = finite_or_null(s.B_max);
  j["B_positive_steps"] = s.B_positive_steps;
  if (s.decay_checked > 0) {
    j["decay_check"] = {{"checked", s.decay_checked}, {"failed", s.decay_failed}};
  } else {
    j["decay_check"] = nullptr;
  }
  j["envelope_ok"] = s.envelope_ok;
  j["wall_time_s"] = s.wall_time_s;
  j["warnings"] = s.warnings;
  return j;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<StepDiagnostics>& rows) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << "step,t,l2,log_l2,lyapunov,boundary_term\n";
  for (const auto& d : rows) {
    out << d.n << ',' << fmt17(d.t) << ',' << fmt17(d.l2) << ',' << fmt17(std::log(d.l2)) << ','
        << fmt17(d.L) << ',' << fmt17(d.B) << '\n';
  }
}

std::vector<StepDiagnostics> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "step,t,l2,log_l2,lyapunov,boundary_term") {
    throw Error(ErrorCode::IoError, "unexpected trace header in " + path.string());
  }
  std::vector<StepDiagnostics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell[6];
    for (auto& c : cell) {
      if (!std::getline(ss, c, ',')) throw Error(ErrorCode::IoError, "short trace row: " + line);
    }
    StepDiagnostics d;
    d.n = std::stol(cell[0]);
    d.t = std::strtod(cell[1].c_str(), nullptr);
    d.l2 = std::strtod(cell[2].c_str(), nullptr);
    d.L = std::strtod(cell[4].c_str(), nullptr);
    d.B = std::strtod(cell[5].c_str(), nullptr);
    rows.push_back(d);
  }
  return rows;
}

}  // namespace kinlyap::cli
