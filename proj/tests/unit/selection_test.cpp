#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/selection.hpp"
#include "fixtures.hpp"

using namespace ancova_cp;
using ancova_cp::fixtures::reference_setup;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScaledSufficientStats stats_with(const Vector& gamma_hat, double d) {
  return ScaledSufficientStats::from_gamma_hat(gamma_hat, d);
}

Vector gamma_with_slopes(double a1, double a2, double a3, double b1, double b2, double b3) {
  Vector g(6);
  g << a1, a2, a3, b1, b2, b3;
  return g;
}

}  // namespace

TEST(FStatistics, ZeroAndEqualSlopes) {
  const auto s = reference_setup();
  const FStatistics zero = f_statistics(Vector::Zero(3), 18.0, s.geom);
  EXPECT_EQ(zero.f_tau, 0.0);
  EXPECT_EQ(zero.f_xi, 0.0);
  const FStatistics equal = f_statistics(Vector::Constant(3, 0.7), 18.0, s.geom);
  EXPECT_GT(equal.f_tau, 0.0);
  EXPECT_EQ(equal.f_xi, 0.0);
  EXPECT_THROW(f_statistics(Vector::Zero(3), 0.0, s.geom), DomainError);
}

TEST(FStatistics, MatchesDenseDefinition) {
  const auto s = reference_setup();
  Vector q(3);
  q << 0.3, -0.1, 0.45;
  const double d = 14.2;
  const FStatistics f = f_statistics(q, d, s.geom);
  const Vector uq = s.geom.U * q;
  EXPECT_NEAR(f.f_tau, (18.0 / 3.0) * q.dot(s.geom.V22.ldlt().solve(q)) / d, 1e-12);
  EXPECT_NEAR(f.f_xi, (18.0 / 2.0) * uq.dot(s.geom.W22.ldlt().solve(uq)) / d, 1e-12);
}

TEST(FStatistics, MonotoneInScale) {
  const auto s = reference_setup();
  Vector q(3);
  q << 0.2, -0.4, 0.1;
  double previous = -1.0;
  for (double c : {0.5, 1.0, 2.0, 4.0}) {
    const double f = f_statistics(c * q, 10.0, s.geom).f_tau;
    EXPECT_GT(f, previous);
    previous = f;
  }
}

TEST(SelectRegion, DegenerateThresholds) {
  const auto s = reference_setup();
  const auto stats = stats_with(gamma_with_slopes(0, 0, 0, 0.5, -0.3, 0.2), 12.0);
  EXPECT_EQ(select_region(stats, s.geom, s.cfg.with_thresholds(kInf, 0.0)).region, Region::A);
  EXPECT_EQ(select_region(stats, s.geom, s.cfg.with_thresholds(0.0, 0.0)).region, Region::C);
  EXPECT_EQ(select_region(stats, s.geom, s.cfg.with_thresholds(0.0, kInf)).region, Region::B);
  const auto null = stats_with(Vector::Zero(6), 18.0);
  EXPECT_EQ(select_region(null, s.geom, s.cfg).region, Region::A);
}

TEST(SelectRegion, TiesAccept) {
  FStatistics f{2.0, 3.0};
  TwoStageConfig cfg;
  cfg.l_tau = 2.0;
  cfg.l_xi = 3.0;
  EXPECT_EQ(classify(f, cfg), Region::A);
  cfg.l_tau = 1.0;
  EXPECT_EQ(classify(f, cfg), Region::B);
  cfg.l_xi = 2.9;
  EXPECT_EQ(classify(f, cfg), Region::C);
}

TEST(SelectRegion, PartitionsDraws) {
  const auto s = reference_setup();
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal(0.0, 0.6);
  std::chi_squared_distribution<double> chi(18);
  for (int t = 0; t < 2000; ++t) {
    Vector g(6);
    for (auto& x : g) x = normal(gen);
    const auto stats = stats_with(g, chi(gen));
    const SelectionOutcome o = select_region(stats, s.geom, s.cfg);
    switch (o.region) {
      case Region::A:
        EXPECT_LE(o.f_tau, s.cfg.l_tau);
        break;
      case Region::B:
        EXPECT_GT(o.f_tau, s.cfg.l_tau);
        EXPECT_LE(o.f_xi, s.cfg.l_xi);
        break;
      case Region::C:
        EXPECT_GT(o.f_tau, s.cfg.l_tau);
        EXPECT_GT(o.f_xi, s.cfg.l_xi);
        break;
    }
  }
}

TEST(Coverage, CenteredCases) {
  const auto s = reference_setup();
  // Zero slopes and γ̂ = γ: every interval is centred on aᵀγ.
  const Vector gamma = gamma_with_slopes(0.4, -0.2, 1.0, 0, 0, 0);
  const auto stats = stats_with(gamma, 18.0);
  EXPECT_TRUE(covers_tau(stats, s.geom, s.cfg, gamma));
  EXPECT_TRUE(covers_xi(stats, s.geom, s.cfg, gamma));
  EXPECT_TRUE(covers_full(stats, s.geom, s.cfg, gamma));
  EXPECT_NEAR(interval_tau(stats, s.geom, s.cfg).center, s.geom.a.dot(gamma), 1e-14);
  // Equal slopes: G_ξ leaves γ unchanged.
  const Vector equal = gamma_with_slopes(0.4, -0.2, 1.0, 0.3, 0.3, 0.3);
  EXPECT_NEAR(interval_xi(stats_with(equal, 18.0), s.geom, s.cfg).center, s.geom.a.dot(equal), 1e-13);
}

TEST(Coverage, DegenerateQuantile) {
  const auto s = reference_setup();
  TwoStageConfig cfg = s.cfg;
  cfg.t_m = cfg.t_mk = cfg.t_mk1 = 0.0;
  const Vector gamma = gamma_with_slopes(0, 0, 0, 0, 0, 0);
  const Vector off = gamma_with_slopes(0.1, 0, 0, 0, 0, 0);
  const auto stats = stats_with(off, 18.0);
  EXPECT_FALSE(covers_tau(stats, s.geom, cfg, gamma));
  EXPECT_FALSE(covers_xi(stats, s.geom, cfg, gamma));
  EXPECT_FALSE(covers_full(stats, s.geom, cfg, gamma));
  // Zero width still covers an exact centre: intervals are closed.
  EXPECT_TRUE(covers_full(stats_with(gamma, 18.0), s.geom, cfg, gamma));
}

TEST(Coverage, IntervalFormulas) {
  const auto s = reference_setup();
  const Vector g = gamma_with_slopes(0.3, 0.1, -0.5, 0.2, -0.1, 0.4);
  const auto stats = stats_with(g, 11.0);
  const Vector q = g.tail(3);
  const Vector uq = s.geom.U * q;
  const auto it = interval_tau(stats, s.geom, s.cfg);
  EXPECT_NEAR(it.center, s.geom.a.dot(s.geom.G_tau * g), 1e-13);
  EXPECT_NEAR(it.half_width,
              s.cfg.t_mk * std::sqrt((11.0 + q.dot(s.geom.V22.ldlt().solve(q))) / 21.0) * std::sqrt(s.geom.v_star),
              1e-13);
  const auto ix = interval_xi(stats, s.geom, s.cfg);
  EXPECT_NEAR(ix.center, s.geom.a.dot(s.geom.G_xi * g), 1e-13);
  EXPECT_NEAR(ix.half_width,
              s.cfg.t_mk1 * std::sqrt((11.0 + uq.dot(s.geom.W22.ldlt().solve(uq))) / 20.0) * std::sqrt(s.geom.w_star),
              1e-13);
  const auto iff = interval_full(stats, s.geom, s.cfg);
  EXPECT_NEAR(iff.center, s.geom.a.dot(g), 1e-14);
  EXPECT_NEAR(iff.half_width, s.cfg.t_m * std::sqrt(11.0 / 18.0) * std::sqrt(s.geom.v11), 1e-13);
}

TEST(Coverage, DispatchFollowsRegion) {
  const auto s = reference_setup();
  std::mt19937_64 gen(8);
  std::normal_distribution<double> normal(0.0, 0.8);
  std::chi_squared_distribution<double> chi(18);
  const Vector gamma = gamma_with_slopes(0, 0, 0, 0.1, 0.2, -0.1);
  for (int t = 0; t < 2000; ++t) {
    Vector g = gamma;
    for (auto& x : g) x += normal(gen);
    const auto stats = stats_with(g, chi(gen));
    SelectionOutcome o;
    const bool covered = coverage_indicator(stats, s.geom, s.cfg, gamma, o);
    const bool want = o.region == Region::A   ? covers_tau(stats, s.geom, s.cfg, gamma)
                      : o.region == Region::B ? covers_xi(stats, s.geom, s.cfg, gamma)
                                              : covers_full(stats, s.geom, s.cfg, gamma);
    EXPECT_EQ(covered, want);
  }
}

TEST(Coverage, InterceptShiftLeavesIndicatorUnchanged) {
  const auto s = reference_setup();
  std::mt19937_64 gen(9);
  std::normal_distribution<double> normal;
  const Vector gamma = gamma_with_slopes(0, 0, 0, 0.05, -0.1, 0.02);
  Vector shift = Vector::Zero(6);
  shift.head(3) << 3.0, -7.0, 11.0;
  for (int t = 0; t < 2000; ++t) {
    Vector g = gamma;
    for (auto& x : g) x += normal(gen);
    const double d = 18.0 + 4.0 * normal(gen);
    if (d <= 0.0) continue;
    EXPECT_EQ(coverage_indicator(stats_with(g, d), s.geom, s.cfg, gamma),
              coverage_indicator(stats_with(g + shift, d), s.geom, s.cfg, gamma + shift));
  }
}
