#pragma once

#include <optional>
#include <string_view>

#include "kinlyap/model.hpp"
#include "kinlyap/structure.hpp"

namespace kinlyap {

enum class SchemeKind { Explicit, Implicit };

std::string_view to_string(SchemeKind kind);

// The complete constant chain behind an exponential-stability certificate
//   ||f^n|| <= C_amp exp(-nu n dt) ||f^0||
// for the split scheme with a boundary law satisfying B <= 0, on (0,1)^d.
struct StabilityCertificate {
  SchemeKind scheme_kind = SchemeKind::Explicit;
  double sigma = 1.0;
  double dx = 0.0;

  double M = 0.0;         // max entry of exp(-sum_l Lambda_l x_l) over the closed cube
  double m = 0.0;         // min entry of the same
  double lambda_M = 0.0;  // max of Lambda0
  double lambda_m = 0.0;  // min of Lambda0
  double lambda_min = 0.0;  // smallest entry of Lambda (0 when Q = 0)
  double norm_P = 0.0;
  double norm_Q_scaled = 0.0;  // ||Q / sigma||_2
  double mu = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  std::optional<double> M_tilde;  // explicit only
  std::optional<double> C3;       // implicit only
  double epsilon = 0.0;
  double alpha = 0.0;
  double dt_cfl = 0.0;
  std::optional<double> dt_source;  // explicit only; +inf when Q = 0
  double nu = 0.0;
  double C_amp = 0.0;

  // mu_1 = m mu / (4 lambda_M alpha), the per-step contraction rate of L.
  double mu1() const noexcept { return m * mu / (4.0 * lambda_M * alpha); }

  // Largest certified step: dt_cfl, and dt_source for explicit schemes.
  double dt_max() const noexcept;
};

struct GeometryExtrema {
  double M = 0.0;
  double m = 0.0;
};

// Closed-form extrema over [0,1]^d of the diagonal entries
// exp(-sum_l lambda_{kl} x_l).
GeometryExtrema geometry_extrema(const KineticModel& model);

// mu_tilde_k(dx) for one component.
double interior_damping_at(const KineticModel& model, int k, double dx);

// mu = min_k sum_{i: lambda_ki != 0} |lambda_ki| (1 - exp(-|lambda_ki|)), the
// value of mu_tilde_k at dx = 1 where the decreasing function attains its
// minimum over (0,1]. The closed form is cross-checked against mu_tilde_k
// sampled on a 1024-point dx grid; a disagreement or a non-positive result
// throws NonPositiveDamping.
double interior_damping(const KineticModel& model);

struct CouplingBounds {
  double C1 = 0.0;
  double C2 = 0.0;
};

// C1 = 2 sup_x ||Lambda Lambda^{21}(x)||_2 and C2 = 2 sup_x ||Lambda Lambda^{22}(x)||_2
// for the block split of P^{-T} Lambda_x P^{-1}; the supremum over [0,1]^d is
// taken on a 17^d lattice (vertices included) and inflated by 5%.
CouplingBounds coupling_bounds(const KineticModel& model, const StructuralDecomposition& dec);

inline constexpr int kCouplingLatticePoints = 17;
inline constexpr double kCouplingInflation = 1.05;

// dx / max_k sum_i |lambda_ki|.
double cfl_time_step(const KineticModel& model, double dx);

// Forward-Euler collision. sigma enters through Q / sigma throughout, so at
// sigma = 1 alpha is exactly max(2 C1^2 lambda_M ||P||^2 / (m mu lambda_m lambda)
// + C2 / lambda, M / lambda_M).
StabilityCertificate certify_explicit(const KineticModel& model, const StructuralDecomposition& dec,
                                      double dx);

// Implicit collision: dt is limited by the CFL bound alone; alpha grows like
// 1/sigma.
StabilityCertificate certify_implicit(const KineticModel& model, const StructuralDecomposition& dec,
                                      double dx);

StabilityCertificate certify(SchemeKind kind, const KineticModel& model,
                             const StructuralDecomposition& dec, double dx);

}  // namespace kinlyap
