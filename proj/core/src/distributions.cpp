#include "ancova_cp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ancova_cp/errors.hpp"

namespace ancova_cp::dist {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Φ(-x) without cancellation for large positive x.
double normal_upper(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

void require_df(double d, const char* name) {
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw DomainError(std::string("degrees of freedom ") + name + " must be positive and finite");
  }
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_interval_probability(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  double p;
  if (lo >= 0.0) {
    p = normal_upper(lo) - normal_upper(hi);
  } else if (hi <= 0.0) {
    p = normal_upper(-hi) - normal_upper(-lo);
  } else {
    p = 1.0 - normal_upper(hi) - normal_upper(-lo);
  }
  return std::clamp(p, 0.0, 1.0);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
  require_df(d1, "d1");
  require_df(d2, "d2");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return incomplete_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_survival(double x, double d1, double d2) {
  require_df(d1, "d1");
  require_df(d2, "d2");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x));
}

double f_upper_quantile(double level, double d1, double d2) {
  require_df(d1, "d1");
  require_df(d2, "d2");
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("significance level must lie strictly between 0 and 1");
  }

  double lo = 0.0;
  double hi = 1.0;
  while (f_survival(hi, d1, d2) > level) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw DomainError("f_upper_quantile: failed to bracket the quantile");
  }
  // Survival is strictly decreasing in x, so plain bisection is enough.
  for (int it = 0; it < 400 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f_survival(mid, d1, d2) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double t_cdf(double x, double df) {
  require_df(df, "df");
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x * x));
  return x >= 0.0 ? 1.0 - tail : tail;
}

double t_two_sided_quantile(double alpha, double df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie strictly between 0 and 1");
  // T² ~ F(1, df), so Pr(|T| > t) = alpha is the upper-alpha quantile of F(1, df).
  return std::sqrt(f_upper_quantile(alpha, 1.0, df));
}

}  // namespace ancova_cp::dist
