#pragma once

#include <span>
#include <vector>

#include "kinlyap/linalg.hpp"
#include "kinlyap/model.hpp"

namespace kinlyap {

// Structural-stability decomposition of a collision matrix Q:
//
//   P Q P^{-1}  = -diag(0_{K-r}, Lambda)
//   Lambda0 Q   = -P^T diag(0_{K-r}, Lambda) P
//
// with Lambda0 and Lambda positive diagonal. The first K - r rows of P span
// the conserved quantities; the last r rows are the dissipated ones.
struct StructuralDecomposition {
  Matrix P;
  Matrix P_inv;
  std::vector<double> lambda0;  // K entries
  std::vector<double> lambda;   // r entries, in block order
  int rank = 0;

  int components() const noexcept { return static_cast<int>(lambda0.size()); }
  int conserved() const noexcept { return components() - rank; }
  double lambda_min() const;  // smallest entry of Lambda; requires rank > 0

  // -diag(0, Lambda) as a K x K matrix.
  Matrix negative_block_diagonal() const;
};

struct DecompositionResiduals {
  double similarity = 0.0;  // || P Q P^{-1} + diag(0, Lambda) ||_max
  double congruence = 0.0;  // || Lambda0 Q + P^T diag(0, Lambda) P ||_max
  double inverse = 0.0;     // || P P^{-1} - I ||_max

  double max() const;
};

// Lambda0 = diag(1/f1, 1/f2, 1/f3, 1/f4) for the coplanar model.
std::vector<double> coplanar_lambda0(const CoplanarSteadyState& state);

// Builds P from the eigendecomposition of the whitened matrix
// W = Lambda0^{-1/2} (Lambda0 Q) Lambda0^{-1/2} = R D R^T (zero eigenvalues
// first), P = R^T Lambda0^{1/2}. The symmetric part is read from the unscaled
// Q; sigma does not enter.
//
// Errors: NotSymmetric when Lambda0 Q is not symmetric, PositiveEigenvalue
// when it is not negative semidefinite, DegenerateRank when Q != 0 but no
// eigenvalue clears the rank tolerance, DecompositionResidual when the
// constructed factors fail re-verification.
StructuralDecomposition decompose(const KineticModel& model, std::span<const double> lambda0);

DecompositionResiduals verify_decomposition(const KineticModel& model,
                                            const StructuralDecomposition& dec);

inline constexpr double kDecompositionTolerance = 1e-10;

}  // namespace kinlyap
