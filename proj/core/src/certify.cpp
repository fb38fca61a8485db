#include "kinlyap/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "kinlyap/error.hpp"

namespace kinlyap {

std::string_view to_string(SchemeKind kind) {
  return kind == SchemeKind::Explicit ? "explicit" : "implicit";
}

double StabilityCertificate::dt_max() const noexcept {
  if (dt_source) return std::min(dt_cfl, *dt_source);
  return dt_cfl;
}

GeometryExtrema geometry_extrema(const KineticModel& model) {
  GeometryExtrema out{0.0, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < model.components(); ++k) {
    double neg = 0.0, pos = 0.0;
    for (int i = 0; i < model.dimension(); ++i) {
      neg += std::min(0.0, model.velocity(k, i));
      pos += std::max(0.0, model.velocity(k, i));
    }
    out.M = std::max(out.M, std::exp(-neg));
    out.m = std::min(out.m, std::exp(-pos));
  }
  return out;
}

double interior_damping_at(const KineticModel& model, int k, double dx) {
  double bracket = 0.0;
  for (int i = 0; i < model.dimension(); ++i) {
    const double l = model.velocity(k, i);
    if (l > 0.0) bracket += (std::exp(-l * dx) - 1.0) / dx * l;
    else if (l < 0.0) bracket += (1.0 - std::exp(l * dx)) / dx * l;
  }
  return -bracket;
}

double interior_damping(const KineticModel& model) {
  constexpr int kSamples = 1024;
  double mu = std::numeric_limits<double>::infinity();
  for (int k = 0; k < model.components(); ++k) {
    double closed = 0.0;
    for (int i = 0; i < model.dimension(); ++i) {
      const double a = std::abs(model.velocity(k, i));
      if (a > 0.0) closed += a * (1.0 - std::exp(-a));
    }
    double sampled = std::numeric_limits<double>::infinity();
    for (int s = 1; s <= kSamples; ++s) {
      sampled = std::min(sampled, interior_damping_at(model, k, static_cast<double>(s) / kSamples));
    }
    if (std::abs(sampled - closed) > 1e-12 * std::max(1.0, closed)) {
      throw Error(ErrorCode::NonPositiveDamping,
                  "sampled damping " + std::to_string(sampled) + " disagrees with closed form " +
                      std::to_string(closed) + " for component " + std::to_string(k));
    }
    mu = std::min(mu, closed);
  }
  if (!(mu > 0.0)) {
    throw Error(ErrorCode::NonPositiveDamping, "interior damping is not positive");
  }
  return mu;
}

CouplingBounds coupling_bounds(const KineticModel& model, const StructuralDecomposition& dec) {
  const int kk = model.components();
  const int d = model.dimension();
  const int r = dec.rank;
  const int c = kk - r;
  if (r == 0) return {};

  const Matrix p_inv_t = dec.P_inv.transpose();
  std::size_t points = 1;
  for (int i = 0; i < d; ++i) points *= kCouplingLatticePoints;

  CouplingBounds out;
  std::vector<double> x(d);
  std::vector<double> diag(kk);
  for (std::size_t q = 0; q < points; ++q) {
    std::size_t rem = q;
    for (int i = d - 1; i >= 0; --i) {
      x[i] = static_cast<double>(rem % kCouplingLatticePoints) / (kCouplingLatticePoints - 1);
      rem /= kCouplingLatticePoints;
    }
    for (int k = 0; k < kk; ++k) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += model.velocity(k, i) * x[i];
      diag[k] = std::exp(-s);
    }
    const Matrix b = p_inv_t * Matrix::diagonal(diag) * dec.P_inv;
    Matrix b21 = b.block(c, 0, r, c);
    Matrix b22 = b.block(c, c, r, r);
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < c; ++j) b21(i, j) *= dec.lambda[i];
      for (int j = 0; j < r; ++j) b22(i, j) *= dec.lambda[i];
    }
    out.C1 = std::max(out.C1, 2.0 * spectral_norm(b21));
    out.C2 = std::max(out.C2, 2.0 * spectral_norm(b22));
  }
  out.C1 *= kCouplingInflation;
  out.C2 *= kCouplingInflation;
  return out;
}

double cfl_time_step(const KineticModel& model, double dx) {
  double speed = 0.0;
  for (int k = 0; k < model.components(); ++k) {
    double s = 0.0;
    for (int i = 0; i < model.dimension(); ++i) s += std::abs(model.velocity(k, i));
    speed = std::max(speed, s);
  }
  return dx / speed;
}

namespace {

void check_dx(double dx) {
  if (!(dx > 0.0) || dx > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "dx must lie in (0, 1]");
  }
  const double n = 1.0 / dx;
  if (std::abs(n - std::round(n)) > 1e-9 * n) {
    throw Error(ErrorCode::InvalidArgument, "1/dx must be an integer");
  }
}

// Fields shared by both certificate kinds.
StabilityCertificate common_chain(const KineticModel& model, const StructuralDecomposition& dec,
                                  double dx) {
  check_dx(dx);
  if (dec.components() != model.components()) {
    throw Error(ErrorCode::DimensionMismatch, "decomposition does not match the model");
  }
  if (dec.rank == 0 && !model.has_zero_collision()) {
    throw Error(ErrorCode::RankZero, "certificate needs rank(Q) > 0 when Q != 0");
  }
  StabilityCertificate c;
  c.sigma = model.sigma();
  c.dx = dx;
  const GeometryExtrema ge = geometry_extrema(model);
  c.M = ge.M;
  c.m = ge.m;
  c.lambda_M = *std::max_element(dec.lambda0.begin(), dec.lambda0.end());
  c.lambda_m = *std::min_element(dec.lambda0.begin(), dec.lambda0.end());
  c.lambda_min = dec.rank > 0 ? dec.lambda_min() : 0.0;
  c.norm_P = spectral_norm(dec.P);
  c.norm_Q_scaled = spectral_norm(model.scaled_collision());
  c.mu = interior_damping(model);
  const CouplingBounds cb = coupling_bounds(model, dec);
  c.C1 = cb.C1;
  c.C2 = cb.C2;
  c.dt_cfl = cfl_time_step(model, dx);
  c.C_amp = std::sqrt(2.0 * c.lambda_M / c.lambda_m);
  return c;
}

void finish(StabilityCertificate& c) {
  c.nu = c.m * c.mu / (8.0 * c.lambda_M * c.alpha);
}

}  // namespace

StabilityCertificate certify_explicit(const KineticModel& model, const StructuralDecomposition& dec,
                                      double dx) {
  StabilityCertificate c = common_chain(model, dec, dx);
  c.scheme_kind = SchemeKind::Explicit;
  const double p2 = c.norm_P * c.norm_P;
  const double mmu = c.m * c.mu;
  c.M_tilde = 2.0 * c.lambda_M * c.norm_Q_scaled * c.norm_Q_scaled / c.lambda_m;
  c.epsilon = mmu * c.lambda_m * c.sigma / (8.0 * p2 * c.lambda_M);
  const double floor = c.M / c.lambda_M;
  if (dec.rank == 0) {
    c.alpha = floor;
    c.dt_source = std::numeric_limits<double>::infinity();
  } else {
    const double l = c.lambda_min;
    c.alpha = std::max(2.0 * c.C1 * c.C1 * c.lambda_M * p2 / (mmu * c.lambda_m * l * c.sigma) +
                           c.C2 / l,
                       floor);
    c.dt_source = mmu / (8.0 * *c.M_tilde * c.lambda_M * c.alpha);
  }
  finish(c);
  return c;
}

StabilityCertificate certify_implicit(const KineticModel& model, const StructuralDecomposition& dec,
                                      double dx) {
  StabilityCertificate c = common_chain(model, dec, dx);
  c.scheme_kind = SchemeKind::Implicit;
  const double p2 = c.norm_P * c.norm_P;
  const double mmu = c.m * c.mu;
  const double c3 = c.lambda_M / c.lambda_m;
  c.C3 = c3;
  c.epsilon = mmu * c.lambda_m * c.sigma / (4.0 * p2 * c.lambda_M * c3);
  const double floor = c.M / c.lambda_M;
  if (dec.rank == 0) {
    c.alpha = floor;
  } else {
    const double l = c.lambda_min;
    c.alpha = std::max(c.C1 * c.C1 * c.lambda_M * c3 * p2 / (mmu * l * c.lambda_m) / c.sigma +
                           c.C2 / l,
                       floor);
  }
  finish(c);
  return c;
}

StabilityCertificate certify(SchemeKind kind, const KineticModel& model,
                             const StructuralDecomposition& dec, double dx) {
  return kind == SchemeKind::Explicit ? certify_explicit(model, dec, dx)
                                      : certify_implicit(model, dec, dx);
}

}  // namespace kinlyap
