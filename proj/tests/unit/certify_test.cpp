#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "kinlyap/certify.hpp"
#include "support.hpp"

namespace kinlyap {
namespace {

using testing::Coplanar;
using testing::paper_state;
using testing::uniform_state;

const double e = std::exp(1.0);

TEST(GeometryExtrema, Coplanar) {
  const auto g = geometry_extrema(Coplanar().model);
  EXPECT_NEAR(g.M, e, 1e-12 * e);
  EXPECT_NEAR(g.m, 1.0 / e, 1e-12 / e);
}

TEST(GeometryExtrema, DiagonalVelocity) {
  const KineticModel m(Matrix{{1.0, 1.0}}, Matrix{{0.0}}, 1.0);
  const auto g = geometry_extrema(m);
  EXPECT_EQ(g.M, 1.0);
  EXPECT_DOUBLE_EQ(g.m, std::exp(-2.0));
}

TEST(InteriorDamping, ClosedForms) {
  EXPECT_NEAR(interior_damping(Coplanar().model), 1.0 - 1.0 / e, 1e-12);
  const KineticModel fast(Matrix{{2.0}}, Matrix{{0.0}}, 1.0);
  EXPECT_NEAR(interior_damping(fast), 2.0 * (1.0 - std::exp(-2.0)), 1e-12);
}

TEST(InteriorDamping, SmallDxLimitIsSumOfSquares) {
  const KineticModel m(Matrix{{2.0, -0.5}, {1.0, 3.0}}, Matrix(2, 2), 1.0);
  EXPECT_NEAR(interior_damping_at(m, 0, 1e-6), 4.25, 4.25e-4);
  EXPECT_NEAR(interior_damping_at(m, 1, 1e-6), 10.0, 10e-4);
}

TEST(InteriorDamping, DecreasingInDx) {
  const auto m = Coplanar().model;
  double prev = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= 100; ++s) {
    const double v = interior_damping_at(m, 0, s / 100.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

// Blocks of P^{-T} diag(E(x)) P^{-1} evaluated with Eigen.
double coupling_at(const StructuralDecomposition& dec, const KineticModel& model,
                   std::span<const double> x, bool c2) {
  const int k = model.components(), r = dec.rank, c = k - r;
  Eigen::MatrixXd pinv(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) pinv(i, j) = dec.P_inv(i, j);
  Eigen::VectorXd ex(k);
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (int l = 0; l < model.dimension(); ++l) s += model.velocity(i, l) * x[l];
    ex(i) = std::exp(-s);
  }
  const Eigen::MatrixXd b = pinv.transpose() * ex.asDiagonal() * pinv;
  Eigen::VectorXd lam(r);
  for (int i = 0; i < r; ++i) lam(i) = dec.lambda[i];
  const Eigen::MatrixXd blk = c2 ? Eigen::MatrixXd(lam.asDiagonal() * b.block(c, c, r, r))
                                 : Eigen::MatrixXd(lam.asDiagonal() * b.block(c, 0, r, c));
  return 2.0 * Eigen::JacobiSVD<Eigen::MatrixXd>(blk).singularValues()(0);
}

TEST(CouplingBounds, BracketedByVertexAndDenseMaxima) {
  for (const auto& s : {uniform_state(), paper_state()}) {
    const Coplanar c(s);
    const auto cb = coupling_bounds(c.model, c.dec);
    double v1 = 0, v2 = 0, d1 = 0, d2 = 0;
    for (double a : {0.0, 1.0})
      for (double b : {0.0, 1.0}) {
        const double x[2] = {a, b};
        v1 = std::max(v1, coupling_at(c.dec, c.model, x, false));
        v2 = std::max(v2, coupling_at(c.dec, c.model, x, true));
      }
    for (int i = 0; i <= 64; ++i)
      for (int j = 0; j <= 64; ++j) {
        const double x[2] = {i / 64.0, j / 64.0};
        d1 = std::max(d1, coupling_at(c.dec, c.model, x, false));
        d2 = std::max(d2, coupling_at(c.dec, c.model, x, true));
      }
    EXPECT_GT(cb.C1, 0.0);
    EXPECT_GT(cb.C2, 0.0);
    EXPECT_GE(cb.C1, kCouplingInflation * v1 * (1 - 1e-12));
    EXPECT_GE(cb.C2, kCouplingInflation * v2 * (1 - 1e-12));
    EXPECT_LE(cb.C1, kCouplingInflation * d1 * (1 + 1e-12));
    EXPECT_LE(cb.C2, kCouplingInflation * d2 * (1 + 1e-12));
    EXPECT_GE(cb.C1, d1);
    EXPECT_GE(cb.C2, d2);
  }
}

TEST(CouplingBounds, ZeroCollisionIsZero) {
  const KineticModel m(Matrix{{1.0}}, Matrix{{0.0}}, 1.0);
  const auto cb = coupling_bounds(m, decompose(m, std::vector<double>{1.0}));
  EXPECT_EQ(cb.C1, 0.0);
  EXPECT_EQ(cb.C2, 0.0);
}

TEST(CouplingBounds, DiagonalFullRank) {
  const KineticModel m(Matrix{{1.0}, {-1.0}}, Matrix{{-1.0, 0.0}, {0.0, -2.0}}, 1.0);
  const auto dec = decompose(m, std::vector<double>{1.0, 1.0});
  ASSERT_EQ(dec.rank, 2);
  EXPECT_EQ(dec.P, Matrix::identity(2));
  const auto cb = coupling_bounds(m, dec);
  EXPECT_NEAR(cb.C2, kCouplingInflation * 2.0 * 2.0 * e, 1e-12);
  EXPECT_EQ(cb.C1, 0.0);
}

TEST(Cfl, ClosedForm) {
  EXPECT_DOUBLE_EQ(cfl_time_step(Coplanar().model, 0.05), 0.05);
  const KineticModel m(Matrix{{2.0, -1.0}, {0.5, 0.5}}, Matrix(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(cfl_time_step(m, 0.1), 0.1 / 3.0);
}

TEST(CertifyExplicit, PaperStateFrozenValues) {
  const Coplanar c;
  const auto cert = certify_explicit(c.model, c.dec, 0.05);
  EXPECT_NEAR(cert.C1, 1.70997, 1e-5);
  EXPECT_NEAR(cert.C2, 1.55543, 1e-5);
  EXPECT_NEAR(cert.alpha, 252.516, 1e-3);
  EXPECT_NEAR(*cert.dt_source, 1.47582e-6, 1e-11);
  EXPECT_NEAR(cert.nu, 2.30227e-5, 1e-10);
  EXPECT_NEAR(cert.mu1(), 2.0 * cert.nu, 1e-18);
  EXPECT_NEAR(cert.C_amp, std::sqrt(2.0 * 5.0 / (5.0 / 3.0)), 1e-14);
  EXPECT_DOUBLE_EQ(cert.dt_cfl, 0.05);
  EXPECT_FALSE(cert.C3.has_value());
}

TEST(CertifyExplicit, SimulationTwoStepIsOutsideCertifiedRange) {
  const Coplanar c;
  const auto cert = certify_explicit(c.model, c.dec, 0.05);
  EXPECT_GE(cert.dt_cfl, 0.01);
  // For any admissible alpha (>= M / lambda_M) the source bound is at most
  // m mu / (8 M_tilde M); dt = 0.01 is above it.
  const double ceiling = cert.m * cert.mu / (8.0 * *cert.M_tilde * cert.M);
  EXPECT_LE(*cert.dt_source, ceiling);
  EXPECT_GT(0.01, ceiling);
}

TEST(CertifyExplicit, PureAdvection) {
  const KineticModel m(Matrix{{1.0}}, Matrix{{0.0}}, 1.0);
  const auto cert = certify_explicit(m, decompose(m, std::vector<double>{1.0}), 0.5);
  EXPECT_EQ(cert.dt_cfl, 0.5);
  EXPECT_TRUE(std::isinf(*cert.dt_source));
  EXPECT_EQ(cert.alpha, cert.M / cert.lambda_M);
  EXPECT_EQ(cert.dt_max(), 0.5);
}

// Independent evaluation on the uniform state: lambda = 1 and ||P||^2 = lambda_M
// because P^T P = Lambda0.
TEST(CertifyExplicit, UniformStateIndependentFormula) {
  const Coplanar c(uniform_state());
  const auto cert = certify_explicit(c.model, c.dec, 0.1);
  const double m = 1.0 / e, mu = 1.0 - 1.0 / e, lM = 4.0, lm = 4.0, lam = 1.0;
  const double p2 = lM;
  const double alpha =
      std::max(2.0 * cert.C1 * cert.C1 * lM * p2 / (m * mu * lm * lam) + cert.C2 / lam, e / lM);
  EXPECT_NEAR(cert.alpha, alpha, 1e-12 * alpha);
  EXPECT_NEAR(cert.epsilon, m * mu * lm / (8.0 * p2 * lM), 1e-15);
  const double q2 = 1.0;  // ||Q||_2 = 0.25 * ||u||^2
  const double mt = 2.0 * lM * q2 / lm;
  EXPECT_NEAR(*cert.M_tilde, mt, 1e-12);
  EXPECT_NEAR(*cert.dt_source, m * mu / (8.0 * mt * lM * alpha), 1e-12 * *cert.dt_source);
  EXPECT_NEAR(cert.nu, m * mu / (8.0 * lM * alpha), 1e-15);
}

TEST(Certify, IndependentOfDxExceptCfl) {
  const Coplanar c;
  for (auto kind : {SchemeKind::Explicit, SchemeKind::Implicit}) {
    const auto ref = certify(kind, c.model, c.dec, 0.5);
    for (double dx : {0.1, 0.02}) {
      const auto x = certify(kind, c.model, c.dec, dx);
      EXPECT_EQ(x.M, ref.M);
      EXPECT_EQ(x.m, ref.m);
      EXPECT_EQ(x.mu, ref.mu);
      EXPECT_EQ(x.C1, ref.C1);
      EXPECT_EQ(x.C2, ref.C2);
      EXPECT_EQ(x.M_tilde, ref.M_tilde);
      EXPECT_EQ(x.C3, ref.C3);
      EXPECT_EQ(x.epsilon, ref.epsilon);
      EXPECT_EQ(x.alpha, ref.alpha);
      EXPECT_EQ(x.dt_source, ref.dt_source);
      EXPECT_EQ(x.nu, ref.nu);
      EXPECT_EQ(x.C_amp, ref.C_amp);
      EXPECT_DOUBLE_EQ(x.dt_cfl, dx);
    }
  }
}

TEST(Certify, ContractionFactorInUnitInterval) {
  const Coplanar c;
  const auto cert = certify_explicit(c.model, c.dec, 0.1);
  for (double f : {1.0, 0.5, 1e-3}) {
    const double q = 1.0 - cert.mu1() * f * cert.dt_max();
    EXPECT_GT(q, 0.0);
    EXPECT_LT(q, 1.0);
  }
}

TEST(Certify, AlphaAboveFloor) {
  for (double sigma : {1.0, 0.1, 0.02}) {
    const Coplanar c(paper_state(), sigma);
    for (auto kind : {SchemeKind::Explicit, SchemeKind::Implicit}) {
      const auto cert = certify(kind, c.model, c.dec, 0.1);
      EXPECT_GE(cert.alpha, cert.M / cert.lambda_M);
    }
  }
}

TEST(CertifyImplicit, CflIndependentOfSigma) {
  const Coplanar stiff(paper_state(), 0.02), soft(paper_state(), 1.0);
  const auto a = certify_implicit(stiff.model, stiff.dec, 0.1);
  const auto b = certify_implicit(soft.model, soft.dec, 0.1);
  EXPECT_EQ(a.dt_cfl, b.dt_cfl);
  EXPECT_DOUBLE_EQ(a.dt_cfl, 0.1);
  EXPECT_EQ(a.dt_max(), a.dt_cfl);
  EXPECT_FALSE(a.dt_source.has_value());
  EXPECT_DOUBLE_EQ(*a.C3, 3.0);
}

TEST(CertifyImplicit, AlphaGrowsAsSigmaShrinks) {
  double prev_alpha = 0.0, prev_nu = 1.0;
  for (double sigma : {1.0, 0.1, 0.02}) {
    const Coplanar c(paper_state(), sigma);
    const auto cert = certify_implicit(c.model, c.dec, 0.1);
    EXPECT_GT(cert.alpha, prev_alpha);
    EXPECT_LT(cert.nu, prev_nu);
    prev_alpha = cert.alpha;
    prev_nu = cert.nu;
  }
}

TEST(CertifyImplicit, ZeroCollisionMatchesExplicit) {
  const KineticModel m(Matrix{{1.0, 0.0}, {0.0, -1.0}}, Matrix(2, 2), 1.0);
  const auto dec = decompose(m, std::vector<double>{1.0, 2.0});
  const auto a = certify_explicit(m, dec, 0.25), b = certify_implicit(m, dec, 0.25);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.nu, b.nu);
  EXPECT_EQ(a.dt_cfl, b.dt_cfl);
  EXPECT_EQ(a.C_amp, b.C_amp);
}

TEST(Certify, Errors) {
  const Coplanar c;
  EXPECT_KINLYAP_ERROR(certify_explicit(c.model, c.dec, 0.3), ErrorCode::InvalidArgument);
  EXPECT_KINLYAP_ERROR(certify_explicit(c.model, c.dec, 1.5), ErrorCode::InvalidArgument);
  auto rankless = c.dec;
  rankless.rank = 0;
  rankless.lambda.clear();
  EXPECT_KINLYAP_ERROR(certify_implicit(c.model, rankless, 0.1), ErrorCode::RankZero);
}

}  // namespace
}  // namespace kinlyap
