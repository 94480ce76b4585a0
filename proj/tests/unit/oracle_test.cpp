#include <cmath>

#include <gtest/gtest.h>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/oracle.hpp"
#include "fixtures.hpp"

using namespace ancova_cp;
using ancova_cp::fixtures::reference_setup;
using ancova_cp::fixtures::unbalanced_setup;

namespace {

Vector beta3(double a1, double a2, double a3, double b1, double b2, double b3) {
  Vector b(6);
  b << a1, a2, a3, b1, b2, b3;
  return b;
}

// Restricted least squares by the Lagrangian system, independent of G.
Vector restricted_fit(const Matrix& X, const Vector& y, const Matrix& C) {
  const Eigen::Index p = X.cols();
  const Eigen::Index r = C.cols();
  Matrix kkt = Matrix::Zero(p + r, p + r);
  kkt.topLeftCorner(p, p) = X.transpose() * X;
  kkt.topRightCorner(p, r) = C;
  kkt.bottomLeftCorner(r, p) = C.transpose();
  Vector rhs = Vector::Zero(p + r);
  rhs.head(p) = X.transpose() * y;
  return kkt.fullPivLu().solve(rhs).head(p);
}

}  // namespace

TEST(RawFit, ZeroNoiseRecoversBeta) {
  const auto s = reference_setup();
  const Vector beta = beta3(10, 12, 9, 0.5, 0.3, 0.4);
  auto gen = rng::make_stream(1, 0, rng::Purpose::RawOracle, 0);
  const RawFit f = simulate_and_fit(beta, 2.0, s.geom, gen, true);
  EXPECT_LT((f.beta_hat - beta).cwiseAbs().maxCoeff(), 1e-11);
  EXPECT_LT(f.rss_full, 1e-18);
}

TEST(RawFit, IdentitiesHold) {
  for (const auto& s : {reference_setup(), unbalanced_setup()}) {
    const auto k = static_cast<Eigen::Index>(s.geom.k);
    Vector beta = Vector::LinSpaced(2 * k, -1.0, 2.0);
    auto gen = rng::make_stream(2, 0, rng::Purpose::RawOracle, 0);
    for (int t = 0; t < 200; ++t) {
      const RawFit f = simulate_and_fit(beta, 1.7, s.geom, gen);
      const Vector tau = f.beta_hat.tail(k);
      const Vector xi = s.geom.U * tau;
      EXPECT_GE(f.rss_tau, f.rss_full);
      EXPECT_GE(f.rss_xi, f.rss_full);
      EXPECT_NEAR(f.rss_tau, f.rss_full + tau.dot(s.geom.V22_inv * tau), 1e-8 * f.rss_tau);
      EXPECT_NEAR(f.rss_xi, f.rss_full + xi.dot(s.geom.W22_inv * xi), 1e-8 * f.rss_xi);
      EXPECT_LT((s.geom.G_tau * f.beta_tau - f.beta_tau).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_NEAR(f.sigma2_hat, f.rss_full / s.geom.m, 1e-14 * f.rss_full);
      // Constrained fits as G·β̂ equal restricted least squares.
      EXPECT_LT((restricted_fit(s.geom.X, f.y, s.geom.C_tau) - f.beta_tau).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((restricted_fit(s.geom.X, f.y, s.geom.C_xi) - f.beta_xi).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(RawFit, ResidualDegreesOfFreedom) {
  const auto s = reference_setup();
  const Vector beta = beta3(1, 2, 3, 0.1, 0.2, 0.3);
  const double sigma = 0.7;
  auto gen = rng::make_stream(3, 0, rng::Purpose::RawOracle, 0);
  const int n = 100000;
  double sum = 0;
  for (int t = 0; t < n; ++t) sum += simulate_and_fit(beta, sigma, s.geom, gen).rss_full / (sigma * sigma);
  EXPECT_NEAR(sum / n, 18.0, 3 * std::sqrt(36.0 / n));
}

TEST(RawDecision, IntervalsMatchScaledForm) {
  const auto s = reference_setup();
  const double sigma = 2.5;
  const Vector beta = beta3(4, -1, 2, 0.3, 0.1, 0.25);
  auto gen = rng::make_stream(4, 0, rng::Purpose::RawOracle, 0);
  for (int t = 0; t < 200; ++t) {
    const RawFit f = simulate_and_fit(beta, sigma, s.geom, gen);
    const RawDecision d = raw_decision(f, beta, s.geom, s.cfg);
    const auto stats = ScaledSufficientStats::from_gamma_hat(f.beta_hat / sigma, f.rss_full / (sigma * sigma));
    const FStatistics fs = f_statistics(stats, s.geom);
    EXPECT_NEAR(d.f.f_tau, fs.f_tau, 1e-8 * fs.f_tau + 1e-14);
    EXPECT_NEAR(d.f.f_xi, fs.f_xi, 1e-8 * fs.f_xi + 1e-14);
    const auto it = interval_tau(stats, s.geom, s.cfg);
    const auto ix = interval_xi(stats, s.geom, s.cfg);
    const auto iff = interval_full(stats, s.geom, s.cfg);
    EXPECT_NEAR(d.interval_tau.lower / sigma, it.lower(), 1e-8);
    EXPECT_NEAR(d.interval_tau.upper / sigma, it.upper(), 1e-8);
    EXPECT_NEAR(d.interval_xi.lower / sigma, ix.lower(), 1e-8);
    EXPECT_NEAR(d.interval_xi.upper / sigma, ix.upper(), 1e-8);
    EXPECT_NEAR(d.interval_full.lower / sigma, iff.lower(), 1e-8);
    EXPECT_NEAR(d.interval_full.upper / sigma, iff.upper(), 1e-8);
  }
}

TEST(EstimateCpRaw, ThresholdsOffIsNominal) {
  const auto s = reference_setup();
  const auto e = estimate_cp_raw(beta3(1, 2, 3, 0.4, -0.2, 0.1), 1.3, s.geom, s.cfg.with_thresholds(0, 0), 20000, 8);
  EXPECT_NEAR(e.estimate, 0.95, 3 * e.se);
  EXPECT_NEAR(e.point.values(0), 0.4 / 1.3, 1e-15);
}

TEST(EstimateCpRaw, ScaleInvariantUnderCommonNoise) {
  const auto s = reference_setup();
  const Vector beta = beta3(1, 2, 3, 0.1, 0.15, -0.05);
  const auto a = estimate_cp_raw(beta, 1.0, s.geom, s.cfg, 5000, 9);
  const auto b = estimate_cp_raw(3.0 * beta, 3.0, s.geom, s.cfg, 5000, 9);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_THROW(estimate_cp_raw(beta, 0.0, s.geom, s.cfg, 100, 1), DomainError);
  EXPECT_THROW(estimate_cp_raw(beta, 1.0, s.geom, s.cfg, 1, 1), DomainError);
}

TEST(CrossCheck, AgreesWithNaiveRunForRun) {
  const auto s = reference_setup();
  Vector v(3);
  v << 0.05, 0.12, 0.02;
  const SlopePoint p(v);
  for (double sigma : {1.0, 0.3}) {
    const auto r = cross_check(p, s.geom, s.cfg, 10000, 12, sigma);
    EXPECT_GE(r.agreement_rate(), 0.999);
    EXPECT_LT(r.max_rss_identity_error, 1e-8);
    EXPECT_LT(r.max_f_error, 1e-8);
    EXPECT_LT(r.max_interval_error, 1e-8);
    const double naive = estimate_naive(p, s.geom, s.cfg, 10000, 12).estimate;
    EXPECT_EQ(std::llround(r.naive_estimate * 10000), std::llround(naive * 10000));
  }
}

TEST(CrossCheck, UnbalancedDesign) {
  const auto s = unbalanced_setup();
  const auto r = cross_check(SlopePoint(Vector::Constant(4, 0.1)), s.geom, s.cfg, 5000, 3);
  EXPECT_GE(r.agreement_rate(), 0.999);
  EXPECT_LT(r.max_rss_identity_error, 1e-8);
}
