#include "kinlyap/lyapunov.hpp"

#include <cmath>
#include <string>

#include "kinlyap/boundary.hpp"
#include "kinlyap/error.hpp"

namespace kinlyap {

namespace {

// Grid coordinates of the face lattice position p of face (axis, side):
// remaining axes in order, last fastest, at interior indices.
void face_point(const Grid& g, int axis, Side side, std::size_t p, std::vector<double>& x) {
  const int d = g.dimension();
  const std::size_t n1 = static_cast<std::size_t>(g.interior_extent());
  x.assign(d, 0.0);
  for (int i = d - 1; i >= 0; --i) {
    if (i == axis) continue;
    x[i] = g.coordinate(static_cast<int>(p % n1) + 1);
    p /= n1;
  }
  x[axis] = side == Side::Low ? 0.0 : 1.0;
}

double exp_weight(const KineticModel& model, int k, const std::vector<double>& x) {
  double s = 0.0;
  for (int l = 0; l < model.dimension(); ++l) s += model.velocity(k, l) * x[l];
  return std::exp(-s);
}

}  // namespace

LyapunovFunctional::LyapunovFunctional(const KineticModel& model,
                                       std::shared_ptr<const BoundaryLayout> layout,
                                       std::span<const double> lambda0, double alpha,
                                       bool shifted_incoming)
    : layout_(std::move(layout)), alpha_(alpha) {
  const Grid& g = layout_->grid();
  const int d = g.dimension();
  const int kk = model.components();
  if (static_cast<int>(lambda0.size()) != kk || layout_->components() != kk ||
      d != model.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "Lyapunov weights do not match the model");
  }
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");

  const double dx = g.spacing();
  cell_volume_ = std::pow(dx, d);
  face_area_ = std::pow(dx, d - 1);

  const std::size_t n = g.interior_count();
  interior_weights_.resize(static_cast<std::size_t>(kk) * n);
  std::vector<double> x(d);
  for (std::size_t p = 0; p < n; ++p) {
    const auto idx = g.interior_index(p);
    for (int i = 0; i < d; ++i) x[i] = g.coordinate(idx[i]);
    for (int k = 0; k < kk; ++k) {
      interior_weights_[k * n + p] = alpha * lambda0[k] + exp_weight(model, k, x);
    }
  }

  const std::size_t face = layout_->face_count();
  incoming_weights_.resize(layout_->incoming_size());
  for (const FaceBlock& b : layout_->incoming()) {
    const double speed = std::abs(model.velocity(b.component, b.axis));
    const double shift = shifted_incoming ? std::exp(-speed * dx) : 1.0;
    for (std::size_t p = 0; p < face; ++p) {
      face_point(g, b.axis, b.side, p, x);
      incoming_weights_[b.offset + p] =
          speed * (alpha * lambda0[b.component] + exp_weight(model, b.component, x) * shift);
    }
  }
  outgoing_weights_.resize(layout_->outgoing_size());
  for (const FaceBlock& b : layout_->outgoing()) {
    const double speed = std::abs(model.velocity(b.component, b.axis));
    for (std::size_t p = 0; p < face; ++p) {
      face_point(g, b.axis, b.side, p, x);
      // Adjacent interior layer: j = 1 at the low face, j = N - 1 at the high face.
      x[b.axis] = b.side == Side::Low ? dx : g.coordinate(g.interior_extent());
      outgoing_weights_[b.offset + p] =
          speed * (alpha * lambda0[b.component] + exp_weight(model, b.component, x));
    }
  }
}

double LyapunovFunctional::value(const Field& field) const {
  const auto v = field.values();
  if (v.size() != interior_weights_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "field does not match the Lyapunov weights");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += v[i] * v[i] * interior_weights_[i];
  return cell_volume_ * sum;
}

double LyapunovFunctional::boundary_term(const OutgoingTrace& outgoing,
                                         const FaceTrace& incoming) const {
  const auto in = incoming.values();
  const auto out = outgoing.values();
  if (in.size() != incoming_weights_.size() || out.size() != outgoing_weights_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "traces do not match the Lyapunov layout");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) sum += in[i] * in[i] * incoming_weights_[i];
  for (std::size_t i = 0; i < out.size(); ++i) sum -= out[i] * out[i] * outgoing_weights_[i];
  return face_area_ * sum;
}

double LyapunovFunctional::boundary_term(const Field& field, const FaceTrace& incoming) const {
  OutgoingTrace outgoing(layout_);
  extract_outgoing(field, outgoing);
  return boundary_term(outgoing, incoming);
}

double lyapunov_value(const Field& field, const KineticModel& model,
                      std::span<const double> lambda0, double alpha) {
  auto layout = std::make_shared<const BoundaryLayout>(model, field.grid());
  return LyapunovFunctional(model, std::move(layout), lambda0, alpha).value(field);
}

double boundary_term(const Field& field, const FaceTrace& incoming, const KineticModel& model,
                     std::span<const double> lambda0, double alpha) {
  return LyapunovFunctional(model, incoming.layout_ptr(), lambda0, alpha)
      .boundary_term(field, incoming);
}

double coplanar_boundary_term_closed_form(const Field& field, const FaceTrace& incoming,
                                          const CoplanarSteadyState& state, double alpha) {
  const Grid& g = field.grid();
  const BoundaryLayout& layout = incoming.layout();
  if (g.dimension() != 2 || field.components() != 4 || !layout.coplanar()) {
    throw Error(ErrorCode::NotCoplanar, "closed-form B needs the coplanar model");
  }
  const int n = g.cells();
  const double dx = g.spacing();
  const double u = state.speed;
  const auto& fe = state.density;

  auto f = [&](int k, int j1, int j2) {
    const int idx[2] = {j1, j2};
    return field.at(k, g.interior_flat(idx));
  };
  const auto left1 = incoming.block(*layout.find_incoming(0, Side::Low, 0));
  const auto right2 = incoming.block(*layout.find_incoming(0, Side::High, 1));
  const auto bottom3 = incoming.block(*layout.find_incoming(1, Side::Low, 2));
  const auto top4 = incoming.block(*layout.find_incoming(1, Side::High, 3));

  const double near = std::exp(-u * dx);
  const double far_out = std::exp(-u * (n - 1) * dx);
  const double back = std::exp(u * dx);
  const double far_in = std::exp(u * (n - 1) * dx);

  double in_low = 0.0, out_high = 0.0, out_low = 0.0, in_high = 0.0;
  for (int j = 1; j <= n - 1; ++j) {
    const double a1 = left1[j - 1], a3 = bottom3[j - 1];
    in_low += a1 * a1 * (alpha / fe[0] + near) + a3 * a3 * (alpha / fe[2] + near);
    const double b1 = f(0, n - 1, j), b3 = f(2, j, n - 1);
    out_high += b1 * b1 * (alpha / fe[0] + far_out) + b3 * b3 * (alpha / fe[2] + far_out);
    const double c2 = f(1, 1, j), c4 = f(3, j, 1);
    out_low += c2 * c2 * (alpha / fe[1] + back) + c4 * c4 * (alpha / fe[3] + back);
    const double d2 = right2[j - 1], d4 = top4[j - 1];
    in_high += d2 * d2 * (alpha / fe[1] + far_in) + d4 * d4 * (alpha / fe[3] + far_in);
  }
  return u * dx * (in_low - out_high - out_low + in_high);
}

bool assert_per_step_decay(double L_prev, double L_next, double L0, double mu1, double dt) {
  return L_next <= (1.0 - mu1 * dt) * L_prev + 1e-12 * L0;
}

bool assert_per_step_decay(const StepDiagnostics& prev, const StepDiagnostics& next,
                           const StabilityCertificate& cert, double dt, double L0) {
  return assert_per_step_decay(prev.L, next.L, L0, cert.mu1(), dt);
}

bool within_envelope(double l2, double l2_initial, double t, const StabilityCertificate& cert) {
  return l2 <= cert.C_amp * std::exp(-cert.nu * t) * l2_initial;
}

DecayFit fit_decay_rate(std::span<const double> t, std::span<const double> l2) {
  if (t.size() != l2.size()) {
    throw Error(ErrorCode::DimensionMismatch, "time and norm series differ in length");
  }
  if (t.size() < 10) {
    throw Error(ErrorCode::InsufficientData,
                "rate fit needs at least 10 samples, got " + std::to_string(t.size()));
  }
  for (double v : l2) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::NonPositiveNorm, "rate fit needs positive finite norms");
    }
  }
  DecayFit fit;
  fit.first = t.size() / 2;
  fit.samples = t.size() - fit.first;
  const double m = static_cast<double>(fit.samples);

  double mt = 0.0, my = 0.0;
  for (std::size_t i = fit.first; i < t.size(); ++i) {
    mt += t[i];
    my += std::log(l2[i]);
  }
  mt /= m;
  my /= m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = fit.first; i < t.size(); ++i) {
    const double dt = t[i] - mt;
    const double dy = std::log(l2[i]) - my;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) {
    throw Error(ErrorCode::InsufficientData, "rate fit needs distinct sample times");
  }
  const double slope = sty / stt;
  fit.rate = -slope;
  if (syy > 0.0) {
    double sse = 0.0;
    for (std::size_t i = fit.first; i < t.size(); ++i) {
      const double r = std::log(l2[i]) - (my + slope * (t[i] - mt));
      sse += r * r;
    }
    fit.r2 = 1.0 - sse / syy;
  }
  return fit;
}

}  // namespace kinlyap
