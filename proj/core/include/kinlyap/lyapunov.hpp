#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kinlyap/certify.hpp"
#include "kinlyap/grid.hpp"
#include "kinlyap/model.hpp"
#include "kinlyap/structure.hpp"

namespace kinlyap {

// Discrete Lyapunov functional
//   L(f) = dx^d sum_j sum_k f_{k,j}^2 (alpha lambda_k0 + exp(-sum_l lambda_kl x_l))
// and the boundary term B of its advection difference. All weights are
// computed once per (model, grid, alpha). Sums run sequentially in storage
// order, so values are bitwise reproducible.
class LyapunovFunctional {
 public:
  // shifted_incoming = false drops the exp(-|lambda| dx) factor from the
  // incoming weights of B; it exists for mutation checks only.
  LyapunovFunctional(const KineticModel& model, std::shared_ptr<const BoundaryLayout> layout,
                     std::span<const double> lambda0, double alpha, bool shifted_incoming = true);

  double alpha() const noexcept { return alpha_; }
  const BoundaryLayout& layout() const noexcept { return *layout_; }

  double value(const Field& field) const;

  // B for the step that advances `field` with incoming boundary values
  // `incoming`:
  //   + |lambda| f_in^2 (alpha lambda_k0 + E exp(-|lambda| dx))  on upwind faces
  //   - |lambda| f^2    (alpha lambda_k0 + E)                    at the adjacent layer
  //                                                              of downwind faces
  // times dx^(d-1), with E = exp(-sum_l lambda_kl x_l) at the point involved.
  double boundary_term(const Field& field, const FaceTrace& incoming) const;
  double boundary_term(const OutgoingTrace& outgoing, const FaceTrace& incoming) const;

 private:
  std::shared_ptr<const BoundaryLayout> layout_;
  double alpha_;
  double cell_volume_;
  double face_area_;
  std::vector<double> interior_weights_;  // component-major, like Field
  std::vector<double> incoming_weights_;  // |lambda| (...) per stacked trace entry
  std::vector<double> outgoing_weights_;
};

// One-shot evaluations.
double lyapunov_value(const Field& field, const KineticModel& model,
                      std::span<const double> lambda0, double alpha);
double boundary_term(const Field& field, const FaceTrace& incoming, const KineticModel& model,
                     std::span<const double> lambda0, double alpha);

// The coplanar B written out face by face, evaluated independently of the
// general layout machinery. The incoming weights on the right and top faces
// are exp(U (N-1) dx).
double coplanar_boundary_term_closed_form(const Field& field, const FaceTrace& incoming,
                                          const CoplanarSteadyState& state, double alpha);

struct StepDiagnostics {
  long n = 0;
  double t = 0.0;
  double l2 = 0.0;
  double L = 0.0;
  double B = 0.0;
  double per_step_ratio = 1.0;  // L(f^{n}) / L(f^{n-1}); 1 for the first row
  bool bound_ok = true;
};

// L_next <= (1 - mu1 dt) L_prev + 1e-12 L0.
bool assert_per_step_decay(double L_prev, double L_next, double L0, double mu1, double dt);
bool assert_per_step_decay(const StepDiagnostics& prev, const StepDiagnostics& next,
                           const StabilityCertificate& cert, double dt, double L0);

// ||f^n|| <= C_amp exp(-nu t) ||f^0||.
bool within_envelope(double l2, double l2_initial, double t, const StabilityCertificate& cert);

struct DecayFit {
  double rate = 0.0;  // minus the slope of log(l2) against t
  double r2 = 1.0;
  std::size_t first = 0;    // first sample used
  std::size_t samples = 0;  // samples used
};

// Least-squares fit of log(l2) against t over the trailing half of the trace
// (samples from index n/2 on). Needs at least 10 samples, all with l2 > 0;
// throws InsufficientData and NonPositiveNorm otherwise. A constant trace
// gives rate 0 and r2 = 1.
DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> l2);

}  // namespace kinlyap
