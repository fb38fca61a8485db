#include "kinlyap/structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinlyap/error.hpp"

namespace kinlyap {

double StructuralDecomposition::lambda_min() const {
  if (lambda.empty()) {
    throw Error(ErrorCode::RankZero, "Lambda is empty (rank zero)");
  }
  return *std::min_element(lambda.begin(), lambda.end());
}

Matrix StructuralDecomposition::negative_block_diagonal() const {
  const auto k = static_cast<std::size_t>(components());
  Matrix d(k, k);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const std::size_t pos = k - lambda.size() + i;
    d(pos, pos) = -lambda[i];
  }
  return d;
}

double DecompositionResiduals::max() const {
  return std::max({similarity, congruence, inverse});
}

std::vector<double> coplanar_lambda0(const CoplanarSteadyState& state) {
  state.validate();
  std::vector<double> out(4);
  for (std::size_t i = 0; i < 4; ++i) out[i] = 1.0 / state.density[i];
  return out;
}

StructuralDecomposition decompose(const KineticModel& model, std::span<const double> lambda0) {
  const auto k = static_cast<std::size_t>(model.components());
  if (lambda0.size() != k) {
    throw Error(ErrorCode::DimensionMismatch,
                "Lambda0 needs " + std::to_string(k) + " entries");
  }
  for (double v : lambda0) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "Lambda0 entries must be positive");
    }
  }

  const Matrix& q = model.collision();
  const Matrix s = Matrix::diagonal(lambda0) * q;
  const double s_norm = s.max_abs();
  if (max_abs_diff(s, s.transpose()) > 1e-10 * s_norm) {
    throw Error(ErrorCode::NotSymmetric, "Lambda0 Q is not symmetric");
  }

  std::vector<double> sqrt_l0(k), inv_sqrt_l0(k);
  for (std::size_t i = 0; i < k; ++i) {
    sqrt_l0[i] = std::sqrt(lambda0[i]);
    inv_sqrt_l0[i] = 1.0 / sqrt_l0[i];
  }
  Matrix w(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) w(i, j) = inv_sqrt_l0[i] * s(i, j) * inv_sqrt_l0[j];

  const SymmetricEigen eig = jacobi_eigen(w);
  const double tol_rank = 1e-10 * std::max(1.0, w.max_abs());
  for (double ev : eig.values) {
    if (ev > tol_rank) {
      throw Error(ErrorCode::PositiveEigenvalue,
                  "Lambda0 Q has positive eigenvalue " + std::to_string(ev));
    }
  }

  StructuralDecomposition dec;
  dec.lambda0.assign(lambda0.begin(), lambda0.end());
  for (double ev : eig.values) {
    if (ev < -tol_rank) dec.lambda.push_back(-ev);
  }
  dec.rank = static_cast<int>(dec.lambda.size());
  if (dec.rank == 0 && !model.has_zero_collision()) {
    throw Error(ErrorCode::DegenerateRank, "Q is nonzero but no eigenvalue clears the rank tolerance");
  }

  // Eigenvalues are descending, so the r dissipative directions are the last
  // r columns of R, matching the diag(0, Lambda) block layout.
  const Matrix& r = eig.vectors;
  dec.P = Matrix(k, k);
  dec.P_inv = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      dec.P(i, j) = r(j, i) * sqrt_l0[j];
      dec.P_inv(i, j) = inv_sqrt_l0[i] * r(i, j);
    }

  const DecompositionResiduals res = verify_decomposition(model, dec);
  const double scale = std::max(1.0, s_norm);
  if (res.max() > kDecompositionTolerance * scale) {
    throw Error(ErrorCode::DecompositionResidual,
                "residual " + std::to_string(res.max()) + " exceeds tolerance");
  }
  return dec;
}

DecompositionResiduals verify_decomposition(const KineticModel& model,
                                            const StructuralDecomposition& dec) {
  const auto k = static_cast<std::size_t>(model.components());
  if (dec.P.rows() != k || dec.P_inv.rows() != k || dec.lambda0.size() != k) {
    throw Error(ErrorCode::DimensionMismatch, "decomposition does not match the model");
  }
  const Matrix& q = model.collision();
  const Matrix block = dec.negative_block_diagonal();

  DecompositionResiduals res;
  res.similarity = max_abs_diff(dec.P * q * dec.P_inv, block);
  res.congruence = max_abs_diff(Matrix::diagonal(dec.lambda0) * q,
                                dec.P.transpose() * block * dec.P);
  res.inverse = max_abs_diff(dec.P * dec.P_inv, Matrix::identity(k));
  return res;
}

}  // namespace kinlyap
