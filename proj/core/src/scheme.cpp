#include "kinlyap/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#if defined(KINLYAP_HAVE_OPENMP)
#include <omp.h>
#endif

#include "kinlyap/error.hpp"

namespace kinlyap {

int threads_from_env() {
  const char* v = std::getenv("KINLYAP_THREADS");
  if (v == nullptr) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || n < 0) return 0;
  return static_cast<int>(n);
}

namespace {

enum class Collision { None, Explicit, Implicit };

// Per-axis upwind data of one component.
struct AxisTerm {
  int axis = 0;
  bool positive = true;     // lambda > 0 reads j - e_i
  double c = 0.0;           // (dt/dx) |lambda|
  std::size_t block = 0;    // incoming trace block on the upwind face
};

struct ComponentPlan {
  double a = 1.0;
  std::vector<AxisTerm> terms;
};

// Everything a row sweep needs; the same object drives the free functions
// and the stepper, so their arithmetic cannot drift apart.
class Kernel {
 public:
  Kernel(const KineticModel& model, const BoundaryLayout& layout, double dt, Collision collision,
         const ImplicitSolver* solver)
      : grid_(layout.grid()), k_(model.components()), collision_(collision), solver_(solver) {
    const double ratio = dt / grid_.spacing();
    plans_.resize(k_);
    for (int k = 0; k < k_; ++k) {
      ComponentPlan& plan = plans_[k];
      for (int i = 0; i < model.dimension(); ++i) {
        const double l = model.velocity(k, i);
        if (l == 0.0) continue;
        AxisTerm t;
        t.axis = i;
        t.positive = l > 0.0;
        t.c = ratio * std::abs(l);
        t.block = *layout.find_incoming(i, t.positive ? Side::Low : Side::High, k);
        plan.a -= t.c;
        plan.terms.push_back(t);
      }
    }
    if (collision_ == Collision::Explicit) {
      const double h = dt / model.sigma();
      b_ = Matrix::identity(k_);
      for (int r = 0; r < k_; ++r)
        for (int c = 0; c < k_; ++c) b_(r, c) += h * model.collision()(r, c);
    }
  }

  // Rows per work unit: long enough for the collision loops to vectorize,
  // short enough for the scratch rows to stay in cache.
  std::size_t rows_per_chunk() const {
    const auto n1 = static_cast<std::size_t>(grid_.interior_extent());
    return std::max<std::size_t>(1, 2048 / n1);
  }

  // Advects (if incoming is non-null) and collides rows [r0, r1).
  void rows(std::size_t r0, std::size_t r1, const Field& in, const FaceTrace* incoming, Field& out,
            std::vector<double>& tmp) const {
    const std::size_t n1 = static_cast<std::size_t>(grid_.interior_extent());
    const std::size_t p0 = r0 * n1;
    const std::size_t len = (r1 - r0) * n1;
    tmp.resize(static_cast<std::size_t>(k_) * len);

    for (int k = 0; k < k_; ++k) {
      const double* f = in.component(k).data();
      double* t = tmp.data() + static_cast<std::size_t>(k) * len;
      if (incoming == nullptr) {
        for (std::size_t q = 0; q < len; ++q) t[q] = f[p0 + q];
        continue;
      }
      const ComponentPlan& plan = plans_[k];
      for (std::size_t q = 0; q < len; ++q) t[q] = plan.a * f[p0 + q];
      for (std::size_t r = r0; r < r1; ++r) {
        for (const AxisTerm& term : plan.terms) {
          advect_axis(term, r, r * n1, f + r * n1, *incoming, t + (r - r0) * n1);
        }
      }
    }

    switch (collision_) {
      case Collision::None:
        for (int k = 0; k < k_; ++k) {
          double* o = out.component(k).data() + p0;
          const double* t = tmp.data() + static_cast<std::size_t>(k) * len;
          for (std::size_t q = 0; q < len; ++q) o[q] = t[q];
        }
        break;
      case Collision::Explicit:
        for (int k = 0; k < k_; ++k) {
          double* o = out.component(k).data() + p0;
          const double b0 = b_(k, 0);
          for (std::size_t q = 0; q < len; ++q) o[q] = b0 * tmp[q];
          for (int l = 1; l < k_; ++l) {
            const double bl = b_(k, l);
            const double* t = tmp.data() + static_cast<std::size_t>(l) * len;
            for (std::size_t q = 0; q < len; ++q) o[q] += bl * t[q];
          }
        }
        break;
      case Collision::Implicit: {
        double stack[64];
        std::vector<double> heap;
        double* cell = stack;
        if (k_ > 64) {
          heap.resize(k_);
          cell = heap.data();
        }
        const std::span<double> view(cell, static_cast<std::size_t>(k_));
        for (std::size_t q = 0; q < len; ++q) {
          for (int l = 0; l < k_; ++l) cell[l] = tmp[static_cast<std::size_t>(l) * len + q];
          solver_->solve_cell(view);
          for (int l = 0; l < k_; ++l) out.component(l)[p0 + q] = cell[l];
        }
        break;
      }
    }
  }

  void sweep(const Field& in, const FaceTrace* incoming, Field& out, int threads) const {
    const std::size_t nrows = grid_.interior_count() / grid_.interior_extent();
    const std::size_t chunk = rows_per_chunk();
    const auto nchunks = static_cast<long>((nrows + chunk - 1) / chunk);
    auto run = [&](long c, std::vector<double>& tmp) {
      const std::size_t r0 = static_cast<std::size_t>(c) * chunk;
      rows(r0, std::min(nrows, r0 + chunk), in, incoming, out, tmp);
    };
#if defined(KINLYAP_HAVE_OPENMP)
    if (threads > 1) {
#pragma omp parallel num_threads(threads)
      {
        std::vector<double> tmp;
#pragma omp for schedule(static)
        for (long c = 0; c < nchunks; ++c) run(c, tmp);
      }
      return;
    }
#else
    (void)threads;
#endif
    std::vector<double> tmp;
    for (long c = 0; c < nchunks; ++c) run(c, tmp);
  }

 private:
  void advect_axis(const AxisTerm& term, std::size_t r, std::size_t p_row, const double* f,
                   const FaceTrace& incoming, double* t) const {
    const std::size_t n1 = static_cast<std::size_t>(grid_.interior_extent());
    const double c = term.c;
    const auto face = incoming.block(term.block);
    if (term.axis == grid_.dimension() - 1) {
      // Along the row: the face lattice position is the row number.
      if (term.positive) {
        t[0] += c * face[r];
        for (std::size_t q = 1; q < n1; ++q) t[q] += c * f[q - 1];
      } else {
        for (std::size_t q = 0; q + 1 < n1; ++q) t[q] += c * f[q + 1];
        t[n1 - 1] += c * face[r];
      }
      return;
    }
    const std::size_t s = grid_.stride(term.axis);
    const std::size_t j = (p_row / s) % n1;
    const double* nb;
    if (term.positive) {
      nb = j == 0 ? face.data() + (p_row / (s * n1)) * s + p_row % s : f - s;
    } else {
      nb = j == n1 - 1 ? face.data() + (p_row / (s * n1)) * s + p_row % s : f + s;
    }
    for (std::size_t q = 0; q < n1; ++q) t[q] += c * nb[q];
  }

  Grid grid_;
  int k_;
  Collision collision_;
  const ImplicitSolver* solver_;
  std::vector<ComponentPlan> plans_;
  Matrix b_;
};

void check_field(const Field& field, const KineticModel& model) {
  if (field.components() != model.components() ||
      field.grid().dimension() != model.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "field does not match the model");
  }
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorCode::InvalidArgument, "dt must be positive and finite");
  }
}

void check_cfl(const KineticModel& model, const Grid& grid, double dt, const StepOptions& opts) {
  const double bound = cfl_time_step(model, grid.spacing());
  if (!opts.allow_cfl_violation && dt > bound * (1.0 + 1e-12)) {
    throw Error(ErrorCode::CflViolation,
                "dt = " + std::to_string(dt) + " exceeds dt_cfl = " + std::to_string(bound));
  }
}

}  // namespace

Field advection_step(const Field& field, const KineticModel& model, const FaceTrace& incoming,
                     double dt, const StepOptions& opts) {
  check_field(field, model);
  check_dt(dt);
  check_cfl(model, field.grid(), dt, opts);
  if (!(incoming.layout().grid() == field.grid()) ||
      incoming.layout().components() != field.components()) {
    throw Error(ErrorCode::DimensionMismatch, "incoming trace does not match the field");
  }
  const Kernel kernel(model, incoming.layout(), dt, Collision::None, nullptr);
  Field out(field.grid(), field.components());
  out.set_step(field.step());
  kernel.sweep(field, &incoming, out, opts.threads);
  return out;
}

Field advection_step(const Field& field, const KineticModel& model, const BoundaryLaw& law,
                     double dt, const StepOptions& opts) {
  check_field(field, model);
  auto layout = std::make_shared<const BoundaryLayout>(model, field.grid());
  const OutgoingTrace outgoing = extract_outgoing(field, layout);
  const FaceTrace incoming = law.apply(outgoing, field.step());
  return advection_step(field, model, incoming, dt, opts);
}

Field collision_explicit(const Field& field, const KineticModel& model, double dt,
                         const StepOptions& opts) {
  check_field(field, model);
  check_dt(dt);
  const BoundaryLayout layout(model, field.grid());
  const Kernel kernel(model, layout, dt, Collision::Explicit, nullptr);
  Field out(field.grid(), field.components());
  out.set_step(field.step());
  kernel.sweep(field, nullptr, out, opts.threads);
  return out;
}

ImplicitSolver::ImplicitSolver(Matrix a, double dt, double sigma)
    : a_(std::move(a)), dt_(dt), sigma_(sigma), lu_(std::make_shared<LuFactorization>(a_)) {}

ImplicitSolver ImplicitSolver::build(const KineticModel& model, double dt) {
  check_dt(dt);
  const double h = dt / model.sigma();
  Matrix a = Matrix::identity(model.components());
  for (int r = 0; r < model.components(); ++r)
    for (int c = 0; c < model.components(); ++c) a(r, c) -= h * model.collision()(r, c);
  return ImplicitSolver(std::move(a), dt, model.sigma());
}

Field collision_implicit(const Field& field, const ImplicitSolver& solver,
                         const StepOptions& opts) {
  if (field.components() != solver.components()) {
    throw Error(ErrorCode::DimensionMismatch, "field does not match the implicit solver");
  }
  Field out(field.grid(), field.components());
  out.set_step(field.step());
  std::vector<double> cell(field.components());
  const std::size_t n = field.grid().interior_count();
  (void)opts;
  for (std::size_t p = 0; p < n; ++p) {
    for (int l = 0; l < field.components(); ++l) cell[l] = field.at(l, p);
    solver.solve_cell(cell);
    for (int l = 0; l < field.components(); ++l) out.at(l, p) = cell[l];
  }
  return out;
}

namespace {

void check_solver(const ImplicitSolver* solver, const KineticModel& model, double dt) {
  if (solver == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "implicit step needs a solver");
  }
  if (solver->dt() != dt || solver->sigma() != model.sigma() ||
      solver->components() != model.components()) {
    throw Error(ErrorCode::InvalidArgument, "implicit solver was built for a different dt or model");
  }
}

}  // namespace

Field split_step(const Field& field, const KineticModel& model, const BoundaryLaw& law, double dt,
                 SchemeKind kind, const ImplicitSolver* solver, const StepOptions& opts) {
  Field tilde = advection_step(field, model, law, dt, opts);
  Field next = [&] {
    if (kind == SchemeKind::Explicit) return collision_explicit(tilde, model, dt, opts);
    check_solver(solver, model, dt);
    return collision_implicit(tilde, *solver, opts);
  }();
  next.set_step(field.step() + 1);
  return next;
}

struct SplitStepper::Impl {
  Impl(const KineticModel& m, std::shared_ptr<const BoundaryLaw> l, const Grid& g, double step,
       SchemeKind k, const StepOptions& o)
      : model(m),
        law(std::move(l)),
        dt(step),
        kind(k),
        opts(o),
        layout(std::make_shared<const BoundaryLayout>(m, g)),
        outgoing(layout),
        incoming(layout),
        next(g, m.components()) {
    check_dt(dt);
    check_cfl(model, g, dt, opts);
    if (kind == SchemeKind::Implicit) solver = std::make_unique<ImplicitSolver>(ImplicitSolver::build(m, dt));
    kernel = std::make_unique<Kernel>(
        model, *layout, dt, kind == SchemeKind::Explicit ? Collision::Explicit : Collision::Implicit,
        solver.get());
  }

  KineticModel model;
  std::shared_ptr<const BoundaryLaw> law;
  double dt;
  SchemeKind kind;
  StepOptions opts;
  std::shared_ptr<const BoundaryLayout> layout;
  OutgoingTrace outgoing;
  FaceTrace incoming;
  Field next;
  std::unique_ptr<ImplicitSolver> solver;
  std::unique_ptr<Kernel> kernel;
};

SplitStepper::SplitStepper(const KineticModel& model, std::shared_ptr<const BoundaryLaw> law,
                           const Grid& grid, double dt, SchemeKind kind, const StepOptions& opts)
    : impl_(std::make_unique<Impl>(model, std::move(law), grid, dt, kind, opts)) {}

SplitStepper::~SplitStepper() = default;
SplitStepper::SplitStepper(SplitStepper&&) noexcept = default;
SplitStepper& SplitStepper::operator=(SplitStepper&&) noexcept = default;

void SplitStepper::step(Field& field) {
  Impl& s = *impl_;
  if (!(field.grid() == s.layout->grid()) || field.components() != s.model.components()) {
    throw Error(ErrorCode::DimensionMismatch, "field does not match the stepper");
  }
  const long n = field.step();
  extract_outgoing(field, s.outgoing);
  s.law->apply(s.outgoing, n, s.incoming);
  s.kernel->sweep(field, &s.incoming, s.next, s.opts.threads);
  std::swap(field, s.next);
  field.set_step(n + 1);
}

double SplitStepper::dt() const noexcept { return impl_->dt; }
SchemeKind SplitStepper::kind() const noexcept { return impl_->kind; }
const std::shared_ptr<const BoundaryLayout>& SplitStepper::layout() const noexcept {
  return impl_->layout;
}
const OutgoingTrace& SplitStepper::last_outgoing() const noexcept { return impl_->outgoing; }
const FaceTrace& SplitStepper::last_incoming() const noexcept { return impl_->incoming; }

}  // namespace kinlyap
