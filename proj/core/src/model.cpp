#include "kinlyap/model.hpp"

#include <cmath>
#include <string>

#include "kinlyap/error.hpp"

namespace kinlyap {

KineticModel::KineticModel(Matrix velocities, Matrix collision, double sigma)
    : velocities_(std::move(velocities)), collision_(std::move(collision)), sigma_(sigma) {
  const std::size_t k = velocities_.rows();
  if (k == 0 || velocities_.cols() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "velocity matrix must be non-empty");
  }
  if (collision_.rows() != k || collision_.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch,
                "collision matrix must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be positive and finite");
  }
  if (!velocities_.is_finite() || !collision_.is_finite()) {
    throw Error(ErrorCode::InvalidArgument, "model entries must be finite");
  }
  for (std::size_t row = 0; row < k; ++row) {
    bool nonzero = false;
    for (double v : velocities_.row(row)) nonzero = nonzero || v != 0.0;
    if (!nonzero) {
      throw Error(ErrorCode::ZeroVelocityRow, "velocity " + std::to_string(row) + " is zero");
    }
  }
}

Matrix KineticModel::scaled_collision() const { return (1.0 / sigma_) * collision_; }

void CoplanarSteadyState::validate(double tol) const {
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw Error(ErrorCode::InvalidArgument, "coplanar speed U must be positive");
  }
  for (double f : density) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error(ErrorCode::InvalidArgument, "steady-state densities must be positive");
    }
  }
  const double lhs = density[0] * density[1];
  const double rhs = density[2] * density[3];
  if (std::abs(lhs - rhs) > tol * lhs) {
    throw Error(ErrorCode::SteadyStateViolation,
                "f1*f2 = " + std::to_string(lhs) + " but f3*f4 = " + std::to_string(rhs));
  }
}

KineticModel coplanar_model(const CoplanarSteadyState& state, double sigma) {
  state.validate();
  const double u = state.speed;
  const auto& f = state.density;
  Matrix velocities{{u, 0.0}, {-u, 0.0}, {0.0, u}, {0.0, -u}};
  Matrix q{{-f[1], -f[0], f[3], f[2]},
           {-f[1], -f[0], f[3], f[2]},
           {f[1], f[0], -f[3], -f[2]},
           {f[1], f[0], -f[3], -f[2]}};
  return KineticModel(std::move(velocities), std::move(q), sigma);
}

bool is_coplanar(const KineticModel& model) {
  if (model.dimension() != 2 || model.components() != 4) return false;
  const double u = model.velocity(0, 0);
  if (!(u > 0.0)) return false;
  const Matrix expected{{u, 0.0}, {-u, 0.0}, {0.0, u}, {0.0, -u}};
  return model.velocities() == expected;
}

double nonlinear_collision_residual(const std::array<double, 4>& f, double sigma) {
  return (f[2] * f[3] - f[0] * f[1]) / sigma;
}

std::array<double, 4> nonlinear_collision_terms(const std::array<double, 4>& f, double sigma) {
  const double r = nonlinear_collision_residual(f, sigma);
  return {r, r, -r, -r};
}

}  // namespace kinlyap
