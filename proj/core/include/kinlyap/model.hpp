#pragma once

#include <array>

#include "kinlyap/linalg.hpp"

namespace kinlyap {

// Linear discrete-velocity system  f_t + sum_i Lambda_i f_{x_i} = (1/sigma) Q f.
//
// Row k of the velocity matrix is the velocity v_k; column i is the diagonal
// of the transport matrix Lambda_i. sigma is kept apart from Q so that
// certificates can expose their dependence on the stiffness scale.
class KineticModel {
 public:
  // Throws ZeroVelocityRow when a velocity is the zero vector, and
  // DimensionMismatch / InvalidArgument for inconsistent or non-finite input.
  KineticModel(Matrix velocities, Matrix collision, double sigma);

  int dimension() const noexcept { return static_cast<int>(velocities_.cols()); }
  int components() const noexcept { return static_cast<int>(velocities_.rows()); }

  double velocity(int k, int i) const { return velocities_(k, i); }
  const Matrix& velocities() const noexcept { return velocities_; }
  const Matrix& collision() const noexcept { return collision_; }
  double sigma() const noexcept { return sigma_; }

  // Q / sigma, the effective source matrix.
  Matrix scaled_collision() const;

  bool has_zero_collision() const { return collision_.max_abs() == 0.0; }

 private:
  Matrix velocities_;
  Matrix collision_;
  double sigma_;
};

// Uniform steady state of the coplanar four-velocity model.
struct CoplanarSteadyState {
  double speed = 1.0;
  std::array<double, 4> density{};

  // Throws InvalidArgument for non-positive components and
  // SteadyStateViolation when f1 f2 != f3 f4 beyond tol (relative to f1 f2).
  void validate(double tol = 1e-12) const;
};

// Linearization of the coplanar model at a uniform steady state: velocities
// (U,0), (-U,0), (0,U), (0,-U); rows 1-2 of Q are (-f2, -f1, f4, f3) and rows
// 3-4 their negation.
KineticModel coplanar_model(const CoplanarSteadyState& state, double sigma);

// True when the model has the coplanar velocity set for some U > 0.
bool is_coplanar(const KineticModel& model);

// (f3 f4 - f1 f2) / sigma: the common magnitude of the nonlinear coplanar
// collision terms (+ for f1, f2; - for f3, f4).
double nonlinear_collision_residual(const std::array<double, 4>& f, double sigma);

// The four nonlinear collision source terms, in component order.
std::array<double, 4> nonlinear_collision_terms(const std::array<double, 4>& f, double sigma);

}  // namespace kinlyap
