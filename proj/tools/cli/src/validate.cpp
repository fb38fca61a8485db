#include "kinlyap/cli/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>

#include "kinlyap/boundary.hpp"
#include "kinlyap/certify.hpp"
#include "kinlyap/error.hpp"
#include "kinlyap/grid.hpp"
#include "kinlyap/lyapunov.hpp"
#include "kinlyap/scheme.hpp"
#include "kinlyap/structure.hpp"

namespace kinlyap::cli {

namespace {

const CoplanarSteadyState kState{1.0, {0.4, 0.3, 0.2, 0.6}};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Context {
  KineticModel model = coplanar_model(kState, 1.0);
  std::vector<double> lambda0 = coplanar_lambda0(kState);
  StructuralDecomposition dec = decompose(model, lambda0);
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> unit{-1.0, 1.0};

  void randomize(std::span<double> v) {
    for (double& x : v) x = unit(rng);
  }
};

CheckResult check_decomposition(Context& ctx, const ValidationOptions& o) {
  Matrix q = ctx.model.collision();
  if (o.q_asymmetry != 0.0) {
    for (std::size_t r = 0; r < q.rows(); ++r)
      for (std::size_t c = 0; c < q.cols(); ++c) q(r, c) += o.q_asymmetry * ctx.unit(ctx.rng);
  }
  const KineticModel m(ctx.model.velocities(), q, 1.0);
  const auto dec = decompose(m, ctx.lambda0);
  const auto res = verify_decomposition(m, dec);
  const bool ok = res.max() <= kDecompositionTolerance && dec.rank == 1 &&
                  std::abs(dec.lambda[0] - 1.5) <= 1e-10;
  return {"decomposition", ok,
          "max residual " + fmt(res.max()) + ", rank " + std::to_string(dec.rank)};
}

CheckResult check_sandwich(Context& ctx, const ValidationOptions&) {
  const Grid g(2, 6);
  const auto cert = certify_explicit(ctx.model, ctx.dec, g.spacing());
  auto layout = std::make_shared<const BoundaryLayout>(ctx.model, g);
  const LyapunovFunctional lf(ctx.model, layout, ctx.lambda0, cert.alpha);
  Field f(g, 4);
  double worst = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    ctx.randomize(f.values());
    const double n2 = std::pow(l2_norm(f), 2);
    const double L = lf.value(f);
    const double lo = cert.alpha * cert.lambda_m * n2, hi = 2.0 * cert.lambda_M * cert.alpha * n2;
    ok = ok && lo <= L && L <= hi;
    worst = std::max(worst, L / hi);
  }
  return {"lyapunov_sandwich", ok, "max L / upper bound " + fmt(worst)};
}

CheckResult check_max_principle(Context& ctx, const ValidationOptions&) {
  const Grid g(2, 6);
  auto layout = std::make_shared<const BoundaryLayout>(ctx.model, g);
  const double dt = cfl_time_step(ctx.model, g.spacing());
  Field f(g, 4);
  FaceTrace in(layout);
  bool ok = true;
  double excess = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ctx.randomize(f.values());
    ctx.randomize(in.values());
    const double b_inf = 0.25 + 2.0 * std::abs(ctx.unit(ctx.rng));
    for (double& v : in.values()) v *= b_inf;
    const Field next = advection_step(f, ctx.model, in, dt);
    double trace_max = 0.0;
    for (double v : in.values()) trace_max = std::max(trace_max, std::abs(v));
    for (int k = 0; k < 4; ++k) {
      double before = 0.0, after = 0.0;
      for (double v : f.component(k)) before = std::max(before, std::abs(v));
      for (double v : next.component(k)) after = std::max(after, std::abs(v));
      const double bound = std::max(before, trace_max);
      excess = std::max(excess, after - bound);
      ok = ok && after <= bound * (1.0 + 1e-14);
    }
  }
  return {"advection_max_principle", ok, "largest excess " + fmt(excess)};
}

CheckResult check_conservation(Context& ctx, const ValidationOptions&) {
  const Grid g(2, 11);  // 100 cells per field, 10 fields
  const int conserved = ctx.dec.conserved();
  double worst = 0.0;
  const double dt = 0.05;
  const auto solver = ImplicitSolver::build(ctx.model, dt);
  Field f(g, 4);
  for (int trial = 0; trial < 10; ++trial) {
    ctx.randomize(f.values());
    const Field ex = collision_explicit(f, ctx.model, dt);
    const Field im = collision_implicit(f, solver);
    for (std::size_t p = 0; p < g.interior_count(); ++p) {
      for (int r = 0; r < conserved; ++r) {
        double u0 = 0.0, ue = 0.0, ui = 0.0;
        for (int k = 0; k < 4; ++k) {
          u0 += ctx.dec.P(r, k) * f.at(k, p);
          ue += ctx.dec.P(r, k) * ex.at(k, p);
          ui += ctx.dec.P(r, k) * im.at(k, p);
        }
        worst = std::max({worst, std::abs(ue - u0), std::abs(ui - u0)});
      }
    }
  }
  return {"collision_conservation", worst <= 1e-12, "max drift " + fmt(worst)};
}

CheckResult check_implicit_contraction(Context& ctx, const ValidationOptions&) {
  const Grid g(2, 11);
  Field f(g, 4);
  double worst = 0.0;
  for (double dt : {0.05, 1.0, 100.0}) {
    const auto solver = ImplicitSolver::build(ctx.model, dt);
    for (int trial = 0; trial < 10; ++trial) {
      ctx.randomize(f.values());
      const Field next = collision_implicit(f, solver);
      for (std::size_t p = 0; p < g.interior_count(); ++p) {
        double before = 0.0, after = 0.0;
        for (int k = 0; k < 4; ++k) {
          before += ctx.lambda0[k] * f.at(k, p) * f.at(k, p);
          after += ctx.lambda0[k] * next.at(k, p) * next.at(k, p);
        }
        worst = std::max(worst, (after - before) / before);
      }
    }
  }
  return {"implicit_contraction", worst <= 1e-12, "largest relative growth " + fmt(worst)};
}

CheckResult check_per_step_decay(Context& ctx, const ValidationOptions&) {
  const Grid g(2, 10);
  const auto cert = certify_explicit(ctx.model, ctx.dec, g.spacing());
  const double dt = 0.9 * cert.dt_max();
  SplitStepper stepper(ctx.model, std::make_shared<TrivialLaw>(), g, dt, SchemeKind::Explicit);
  const LyapunovFunctional lf(ctx.model, stepper.layout(), ctx.lambda0, cert.alpha);
  Field f(g, 4, 1.0);
  const double L0 = lf.value(f);
  double L = L0;
  long failed = 0;
  constexpr long kSteps = 2000;
  for (long n = 0; n < kSteps; ++n) {
    stepper.step(f);
    const double next = lf.value(f);
    if (!assert_per_step_decay(L, next, L0, cert.mu1(), dt)) ++failed;
    L = next;
  }
  return {"per_step_decay", failed == 0,
          std::to_string(failed) + " of " + std::to_string(kSteps) + " steps violate the contraction"};
}

CheckResult check_dual_boundary(Context& ctx, const ValidationOptions& o) {
  const Grid g(2, 7);
  auto layout = std::make_shared<const BoundaryLayout>(ctx.model, g);
  const double alpha = certify_explicit(ctx.model, ctx.dec, g.spacing()).alpha;
  const LyapunovFunctional lf(ctx.model, layout, ctx.lambda0, alpha, !o.drop_incoming_shift);
  Field f(g, 4);
  FaceTrace in(layout);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ctx.randomize(f.values());
    ctx.randomize(in.values());
    const double general = lf.boundary_term(f, in);
    const double closed = coplanar_boundary_term_closed_form(f, in, kState, alpha);
    worst = std::max(worst, std::abs(general - closed) / std::max(1.0, std::abs(closed)));
  }
  return {"dual_boundary_term", worst <= 1e-12, "max relative difference " + fmt(worst)};
}

}  // namespace

std::vector<CheckResult> cmd_validate(const ValidationOptions& options) {
  Context ctx;
  ctx.rng.seed(options.seed);
  using Check = std::function<CheckResult(Context&, const ValidationOptions&)>;
  const std::pair<const char*, Check> checks[] = {
      {"decomposition", check_decomposition},
      {"lyapunov_sandwich", check_sandwich},
      {"advection_max_principle", check_max_principle},
      {"collision_conservation", check_conservation},
      {"implicit_contraction", check_implicit_contraction},
      {"per_step_decay", check_per_step_decay},
      {"dual_boundary_term", check_dual_boundary},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, run] : checks) {
    try {
      out.push_back(run(ctx, options));
    } catch (const std::exception& e) {
      out.push_back({name, false, e.what()});
    }
  }
  return out;
}

}  // namespace kinlyap::cli
