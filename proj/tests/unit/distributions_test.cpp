#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "ancova_cp/distributions.hpp"
#include "ancova_cp/errors.hpp"

namespace dist = ancova_cp::dist;
namespace bm = boost::math;

TEST(NormalCdf, MatchesBoostAcrossRange) {
  const bm::normal n;
  for (double x = -12.0; x <= 12.0; x += 0.37) {
    const double want = bm::cdf(n, x);
    EXPECT_NEAR(dist::normal_cdf(x), want, 1e-15 + 1e-13 * want) << x;
  }
}

TEST(NormalCdf, IntervalProbabilityInBothTails) {
  const bm::normal n;
  EXPECT_NEAR(dist::normal_interval_probability(9.0, 9.5), bm::cdf(bm::complement(n, 9.0)) -
                                                               bm::cdf(bm::complement(n, 9.5)),
              1e-30);
  EXPECT_GT(dist::normal_interval_probability(9.0, 9.5), 0.0);
  EXPECT_GT(dist::normal_interval_probability(-9.5, -9.0), 0.0);
  EXPECT_NEAR(dist::normal_interval_probability(-1.96, 1.96), 0.9500042097035593, 1e-14);
  EXPECT_EQ(dist::normal_interval_probability(1.0, 1.0), 0.0);
  EXPECT_EQ(dist::normal_interval_probability(2.0, 1.0), 0.0);
  EXPECT_EQ(dist::normal_interval_probability(-std::numeric_limits<double>::infinity(),
                                              std::numeric_limits<double>::infinity()),
            1.0);
}

TEST(IncompleteBeta, MatchesBoost) {
  for (double a : {0.5, 1.0, 1.5, 9.0, 10.5, 40.0}) {
    for (double b : {0.5, 1.0, 2.5, 9.0, 30.0}) {
      for (double x : {0.0, 1e-6, 0.01, 0.2, 0.5, 0.77, 0.99, 1.0}) {
        const double want = bm::ibeta(a, b, x);
        EXPECT_NEAR(dist::incomplete_beta(a, b, x), want, 1e-13) << a << ' ' << b << ' ' << x;
      }
    }
  }
}

TEST(FDistribution, CdfAndSurvivalMatchBoost) {
  for (double d1 : {1.0, 2.0, 3.0, 7.0}) {
    for (double d2 : {5.0, 18.0, 21.0, 120.0}) {
      const bm::fisher_f f(d1, d2);
      for (double x : {0.01, 0.5, 1.0, 2.4, 6.0, 40.0}) {
        EXPECT_NEAR(dist::f_cdf(x, d1, d2), bm::cdf(f, x), 1e-13);
        const double s = bm::cdf(bm::complement(f, x));
        EXPECT_NEAR(dist::f_survival(x, d1, d2), s, 1e-13 + 1e-10 * s);
      }
    }
  }
}

TEST(FDistribution, UpperQuantilesForReferenceDesign) {
  // k = 3, m = 18 at the 10% level.
  EXPECT_NEAR(dist::f_upper_quantile(0.10, 3, 18), bm::quantile(bm::complement(bm::fisher_f(3, 18), 0.10)), 1e-8);
  EXPECT_NEAR(dist::f_upper_quantile(0.10, 2, 18), bm::quantile(bm::complement(bm::fisher_f(2, 18), 0.10)), 1e-8);
  EXPECT_NEAR(dist::f_upper_quantile(0.10, 3, 18), 2.4160053771779433, 1e-8);
  EXPECT_NEAR(dist::f_upper_quantile(0.10, 2, 18), 2.623946985133954, 1e-8);
}

TEST(FDistribution, QuantileInvertsSurvival) {
  for (double level : {0.5, 0.1, 0.05, 1e-4}) {
    for (double d1 : {1.0, 4.0}) {
      for (double d2 : {3.0, 30.0}) {
        const double q = dist::f_upper_quantile(level, d1, d2);
        EXPECT_NEAR(dist::f_survival(q, d1, d2), level, 1e-10 * std::max(1.0, 1.0 / level) * level);
      }
    }
  }
}

TEST(FDistribution, RejectsInvalidArguments) {
  EXPECT_THROW(dist::f_upper_quantile(0.0, 3, 18), ancova_cp::DomainError);
  EXPECT_THROW(dist::f_upper_quantile(1.0, 3, 18), ancova_cp::DomainError);
  EXPECT_THROW(dist::f_upper_quantile(-0.1, 3, 18), ancova_cp::DomainError);
  EXPECT_THROW(dist::f_upper_quantile(std::nan(""), 3, 18), ancova_cp::DomainError);
  EXPECT_THROW(dist::f_upper_quantile(0.1, 0, 18), ancova_cp::DomainError);
  EXPECT_THROW(dist::f_upper_quantile(0.1, 3, -1), ancova_cp::DomainError);
}

TEST(StudentT, TwoSidedQuantilesMatchBoost) {
  for (double df : {1.0, 2.0, 18.0, 20.0, 21.0, 200.0}) {
    for (double alpha : {0.2, 0.05, 0.01}) {
      const double want = bm::quantile(bm::students_t(df), 1.0 - alpha / 2.0);
      EXPECT_NEAR(dist::t_two_sided_quantile(alpha, df), want, 1e-8 * std::max(1.0, want)) << df << ' ' << alpha;
    }
  }
  EXPECT_NEAR(dist::t_two_sided_quantile(0.05, 18), 2.10092204024096, 1e-8);
  EXPECT_NEAR(dist::t_two_sided_quantile(0.05, 21), 2.0796138447276626, 1e-8);
  EXPECT_NEAR(dist::t_two_sided_quantile(0.05, 20), 2.085963447265837, 1e-8);
}

TEST(StudentT, CdfMatchesBoost) {
  for (double df : {1.0, 5.0, 18.0}) {
    const bm::students_t t(df);
    for (double x : {-30.0, -2.1, -0.3, 0.0, 0.7, 2.1, 9.0}) EXPECT_NEAR(dist::t_cdf(x, df), bm::cdf(t, x), 1e-13);
  }
}

TEST(StudentT, RejectsInvalidLevel) {
  EXPECT_THROW(dist::t_two_sided_quantile(0.0, 18), ancova_cp::DomainError);
  EXPECT_THROW(dist::t_two_sided_quantile(1.0, 18), ancova_cp::DomainError);
}
