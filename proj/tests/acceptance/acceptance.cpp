// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. The optional argument is the output directory for
// the reproduction runs.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "kinlyap/boundary.hpp"
#include "kinlyap/certify.hpp"
#include "kinlyap/cli/driver.hpp"
#include "kinlyap/cli/presets.hpp"
#include "kinlyap/grid.hpp"
#include "kinlyap/lyapunov.hpp"
#include "kinlyap/model.hpp"
#include "kinlyap/scheme.hpp"
#include "kinlyap/structure.hpp"

namespace fs = std::filesystem;
using namespace kinlyap;

namespace {

const CoplanarSteadyState kState{1.0, {0.4, 0.3, 0.2, 0.6}};

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Setup {
  KineticModel model;
  std::vector<double> lambda0;
  StructuralDecomposition dec;

  explicit Setup(double sigma = 1.0)
      : model(coplanar_model(kState, sigma)),
        lambda0(coplanar_lambda0(kState)),
        dec(decompose(model, lambda0)) {}
};

std::mt19937_64 rng(20240611);
std::uniform_real_distribution<double> unit(-1.0, 1.0);

void randomize(std::span<double> v) {
  for (double& x : v) x = unit(rng);
}

Outcome decomposition() {
  const auto t0 = std::chrono::steady_clock::now();
  const Setup s;
  const auto res = verify_decomposition(s.model, s.dec);
  const double elapsed = seconds_since(t0);
  const bool ok = res.similarity <= 1e-10 && res.congruence <= 1e-10 && res.inverse <= 1e-10 &&
                  s.dec.rank == 1 && std::abs(s.dec.lambda[0] - 1.5) <= 1e-10 && elapsed < 1.0;
  return {ok, "max residual " + fmt("%.2e", res.max()) + ", r = " + std::to_string(s.dec.rank) +
                  ", Lambda = " + fmt("%.15g", s.dec.lambda.empty() ? 0.0 : s.dec.lambda[0]) +
                  ", " + fmt("%.3g", elapsed) + " s"};
}

Outcome certificate_chain() {
  const Setup s;
  const double e = std::exp(1.0);
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const auto c = certify_explicit(s.model, s.dec, 0.1);
  const double worst = std::max({rel(c.M, e), rel(c.m, 1.0 / e), rel(c.mu, 1.0 - 1.0 / e)});
  bool same = true;
  for (auto kind : {SchemeKind::Explicit, SchemeKind::Implicit}) {
    const auto ref = certify(kind, s.model, s.dec, 0.5);
    for (double dx : {0.1, 0.02}) {
      const auto x = certify(kind, s.model, s.dec, dx);
      same = same && x.M == ref.M && x.m == ref.m && x.lambda_M == ref.lambda_M &&
             x.lambda_m == ref.lambda_m && x.norm_P == ref.norm_P && x.mu == ref.mu &&
             x.C1 == ref.C1 && x.C2 == ref.C2 && x.M_tilde == ref.M_tilde && x.C3 == ref.C3 &&
             x.epsilon == ref.epsilon && x.alpha == ref.alpha && x.dt_source == ref.dt_source &&
             x.nu == ref.nu && x.C_amp == ref.C_amp && x.dt_cfl != ref.dt_cfl;
    }
  }
  return {worst <= 1e-12 && same, "max relative error " + fmt("%.2e", worst) +
                                      (same ? ", dx changes dt_cfl only" : ", dx leaks into constants")};
}

Outcome per_step_contraction() {
  bool ok = true;
  std::string detail;
  for (int n : {10, 20}) {
    cli::RunConfig c;
    c.name = "contraction_N" + std::to_string(n);
    c.model.state = kState;
    c.N = n;
    c.t_final = 5.0;
    c.initial = {1.0, 1.0, 1.0, 1.0};
    c.check_decay = true;
    c.record_every = 1000;
    const auto r = cli::cmd_run(c);
    const bool run_ok = r.certified && !r.diverged && r.decay_failed == 0 &&
                        r.decay_checked == r.steps_taken && r.steps_taken > 0 && r.envelope_ok;
    ok = ok && run_ok;
    detail += "N=" + std::to_string(n) + ": " + std::to_string(r.decay_checked - r.decay_failed) +
              "/" + std::to_string(r.steps_taken) + " steps contract, envelope " +
              (r.envelope_ok ? "holds" : "violated") + "; ";
  }
  return {ok, detail};
}

Outcome reproduce(const std::string& name, const fs::path& outdir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = cli::cmd_reproduce(name, outdir / name);
  std::string detail;
  for (const auto& c : report.checks) {
    detail += std::string(c.passed ? "[ok] " : "[failed] ") + c.name + " (" + c.detail + "); ";
  }
  return {report.all_passed(), detail + fmt("%.1f s", seconds_since(t0))};
}

Outcome implicit_contraction() {
  const Grid g(2, 11);
  double worst = -std::numeric_limits<double>::infinity();
  for (double sigma : {1.0, 0.02}) {
    const Setup s(sigma);
    for (double dt : {0.05, 1.0, 100.0}) {
      const auto solver = ImplicitSolver::build(s.model, dt);
      Field f(g, 4);
      for (int trial = 0; trial < 10; ++trial) {
        randomize(f.values());
        const Field next = collision_implicit(f, solver);
        for (std::size_t p = 0; p < g.interior_count(); ++p) {
          double before = 0.0, after = 0.0;
          for (int k = 0; k < 4; ++k) {
            before += s.lambda0[k] * f.at(k, p) * f.at(k, p);
            after += s.lambda0[k] * next.at(k, p) * next.at(k, p);
          }
          worst = std::max(worst, (after - before) / before);
        }
      }
    }
  }
  return {worst <= 1e-12, "largest relative growth " + fmt("%.2e", worst)};
}

Outcome conservation() {
  const Setup s;
  const Grid g(2, 11);
  const double dt = 0.05;
  const auto solver = ImplicitSolver::build(s.model, dt);
  double worst = 0.0;
  std::size_t cells = 0;
  Field f(g, 4);
  for (int trial = 0; trial < 10; ++trial) {
    randomize(f.values());
    const Field ex = collision_explicit(f, s.model, dt);
    const Field im = collision_implicit(f, solver);
    for (std::size_t p = 0; p < g.interior_count(); ++p, ++cells) {
      for (int r = 0; r < s.dec.conserved(); ++r) {
        double u0 = 0.0, ue = 0.0, ui = 0.0;
        for (int k = 0; k < 4; ++k) {
          u0 += s.dec.P(r, k) * f.at(k, p);
          ue += s.dec.P(r, k) * ex.at(k, p);
          ui += s.dec.P(r, k) * im.at(k, p);
        }
        worst = std::max({worst, std::abs(ue - u0), std::abs(ui - u0)});
      }
    }
  }
  return {cells >= 1000 && worst <= 1e-12,
          std::to_string(cells) + " cells, max drift " + fmt("%.2e", worst)};
}

// One upwind step written directly from the grid indices.
Field oracle_advection(const Field& f, const KineticModel& model, const FaceTrace& in, double dt) {
  const Grid& g = f.grid();
  const BoundaryLayout& layout = in.layout();
  const int n = g.cells();
  const double dx = g.spacing();
  Field out(g, f.components());
  for (int k = 0; k < f.components(); ++k) {
    const double c0 = dt / dx * std::abs(model.velocity(k, 0));
    const double c1 = dt / dx * std::abs(model.velocity(k, 1));
    const double a = 1.0 - c0 - c1;
    for (int j1 = 1; j1 < n; ++j1) {
      for (int j2 = 1; j2 < n; ++j2) {
        const auto value = [&](int i1, int i2, int axis) {
          if (i1 >= 1 && i1 < n && i2 >= 1 && i2 < n) {
            return f.at(k, static_cast<std::size_t>((i1 - 1) * (n - 1) + (i2 - 1)));
          }
          const int along = axis == 0 ? i1 : i2;
          const Side side = along == 0 ? Side::Low : Side::High;
          const std::size_t p = static_cast<std::size_t>((axis == 0 ? i2 : i1) - 1);
          return in.values()[layout.incoming()[*layout.find_incoming(axis, side, k)].offset + p];
        };
        const std::size_t flat = static_cast<std::size_t>((j1 - 1) * (n - 1) + (j2 - 1));
        double t = a * f.at(k, flat);
        const double v0 = model.velocity(k, 0), v1 = model.velocity(k, 1);
        if (v0 != 0.0) t += c0 * (v0 > 0.0 ? value(j1 - 1, j2, 0) : value(j1 + 1, j2, 0));
        if (v1 != 0.0) t += c1 * (v1 > 0.0 ? value(j1, j2 - 1, 1) : value(j1, j2 + 1, 1));
        out.at(k, flat) = t;
      }
    }
  }
  return out;
}

Outcome advection() {
  const Setup s;
  const Grid g(2, 4);
  auto layout = std::make_shared<const BoundaryLayout>(s.model, g);
  bool bitwise = true;
  for (double frac : {1.0, 0.7, 0.3}) {
    const double dt = frac * cfl_time_step(s.model, g.spacing());
    Field f(g, 4);
    FaceTrace in(layout);
    randomize(f.values());
    randomize(in.values());
    const Field got = advection_step(f, s.model, in, dt);
    const Field want = oracle_advection(f, s.model, in, dt);
    for (std::size_t i = 0; i < got.values().size(); ++i) {
      bitwise = bitwise && std::bit_cast<std::uint64_t>(got.values()[i]) ==
                               std::bit_cast<std::uint64_t>(want.values()[i]);
    }
  }

  bool bounded = true;
  const double dt = cfl_time_step(s.model, g.spacing());
  Field f(g, 4);
  FaceTrace in(layout);
  for (int trial = 0; trial < 100; ++trial) {
    randomize(f.values());
    randomize(in.values());
    const Field next = advection_step(f, s.model, in, dt);
    for (int k = 0; k < 4; ++k) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (double v : f.component(k)) lo = std::min(lo, v), hi = std::max(hi, v);
      for (std::size_t b = 0; b < in.blocks().size(); ++b) {
        if (in.blocks()[b].component != k) continue;
        for (double v : in.block(b)) lo = std::min(lo, v), hi = std::max(hi, v);
      }
      for (double v : next.component(k)) bounded = bounded && lo <= v && v <= hi;
    }
  }
  return {bitwise && bounded, std::string("oracle ") + (bitwise ? "bitwise equal" : "differs") +
                                  ", max principle " + (bounded ? "holds" : "violated")};
}

Outcome dual_boundary() {
  const Setup s;
  const Grid g(2, 10);
  auto layout = std::make_shared<const BoundaryLayout>(s.model, g);
  const double alpha = certify_explicit(s.model, s.dec, g.spacing()).alpha;
  const LyapunovFunctional lf(s.model, layout, s.lambda0, alpha);
  Field f(g, 4);
  FaceTrace in(layout);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    randomize(f.values());
    randomize(in.values());
    const double general = lf.boundary_term(f, in);
    const double closed = coplanar_boundary_term_closed_form(f, in, kState, alpha);
    worst = std::max(worst, std::abs(general - closed) / std::max(1.0, std::abs(closed)));
  }
  return {worst <= 1e-12, "max relative difference " + fmt("%.2e", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path outdir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"structural decomposition", decomposition},
      {"certificate chain", certificate_chain},
      {"per-step contraction", per_step_contraction},
      {"simulation I", [&] { return reproduce("sim1", outdir); }},
      {"simulation II", [&] { return reproduce("sim2", outdir); }},
      {"simulation III", [&] { return reproduce("sim3", outdir); }},
      {"implicit contraction", implicit_contraction},
      {"conservation", conservation},
      {"advection oracle and max principle", advection},
      {"dual boundary term", dual_boundary},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("%s %d %s: %s\n", o.passed ? "PASS" : "FAIL", index++, name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
