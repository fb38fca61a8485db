#pragma once

#include <memory>
#include <span>

#include "kinlyap/boundary.hpp"
#include "kinlyap/certify.hpp"
#include "kinlyap/grid.hpp"
#include "kinlyap/linalg.hpp"
#include "kinlyap/model.hpp"

namespace kinlyap {

struct StepOptions {
  // Lets advection run with dt above the CFL bound. Only the CLI's force
  // flag sets this.
  bool allow_cfl_violation = false;
  // 0 or 1 runs sequentially; results are bitwise identical for any value.
  int threads = 0;
};

// Reads KINLYAP_THREADS (unset or unparsable means 0).
int threads_from_env();

// Upwind advection with every neighbor taken from the step-n buffer. Each
// value is updated as the convex combination
//   (1 - sum_i c_ki) f_j + sum_i c_ki f_{j -/+ e_i},   c_ki = (dt/dx) |lambda_ki|,
// accumulated axis by axis in ascending order. Neighbors outside the interior
// come from the incoming trace.
//
// Throws CflViolation when dt exceeds the CFL bound, unless allowed.
Field advection_step(const Field& field, const KineticModel& model, const FaceTrace& incoming,
                     double dt, const StepOptions& opts = {});

// As above with incoming = law.apply(extract_outgoing(field), field.step()).
Field advection_step(const Field& field, const KineticModel& model, const BoundaryLaw& law,
                     double dt, const StepOptions& opts = {});

// Per cell f <- (I + (dt/sigma) Q) f.
Field collision_explicit(const Field& field, const KineticModel& model, double dt,
                         const StepOptions& opts = {});

// Factorization of A = I - (dt/sigma) Q, built once per (model, dt).
class ImplicitSolver {
 public:
  static ImplicitSolver build(const KineticModel& model, double dt);

  double dt() const noexcept { return dt_; }
  double sigma() const noexcept { return sigma_; }
  int components() const noexcept { return static_cast<int>(a_.rows()); }
  const Matrix& matrix() const noexcept { return a_; }
  const LuFactorization& factors() const noexcept { return *lu_; }

  // Overwrites one cell value with A^{-1} value.
  void solve_cell(std::span<double> value) const { lu_->solve_in_place(value); }

 private:
  ImplicitSolver(Matrix a, double dt, double sigma);

  Matrix a_;
  double dt_;
  double sigma_;
  std::shared_ptr<const LuFactorization> lu_;
};

// Per cell solves (I - (dt/sigma) Q) f_next = f.
Field collision_implicit(const Field& field, const ImplicitSolver& solver,
                         const StepOptions& opts = {});

// Advection followed by the selected collision step; the result carries step
// n + 1. Implicit steps need a solver built for the same dt.
Field split_step(const Field& field, const KineticModel& model, const BoundaryLaw& law, double dt,
                 SchemeKind kind, const ImplicitSolver* solver = nullptr,
                 const StepOptions& opts = {});

// Repeated split steps with preallocated traces and buffers. Advection and
// collision are fused row by row, with the same arithmetic as split_step, so
// the two agree bitwise.
class SplitStepper {
 public:
  SplitStepper(const KineticModel& model, std::shared_ptr<const BoundaryLaw> law, const Grid& grid,
               double dt, SchemeKind kind, const StepOptions& opts = {});
  ~SplitStepper();
  SplitStepper(SplitStepper&&) noexcept;
  SplitStepper& operator=(SplitStepper&&) noexcept;

  // Advances field by one step in place.
  void step(Field& field);

  double dt() const noexcept;
  SchemeKind kind() const noexcept;
  const std::shared_ptr<const BoundaryLayout>& layout() const noexcept;
  // Traces used by the most recent step.
  const OutgoingTrace& last_outgoing() const noexcept;
  const FaceTrace& last_incoming() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace kinlyap
