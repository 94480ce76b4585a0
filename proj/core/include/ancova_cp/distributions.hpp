#pragma once

// Normal, Student t and Snedecor F distribution functions needed by the
// two-stage procedure: Φ for the conditional coverage kernel, and upper
// quantiles of F / t for the test thresholds and interval half-widths.

namespace ancova_cp::dist {

/// Standard normal distribution function, Φ(x) = erfc(-x/√2)/2.
double normal_cdf(double x);

/// Φ(hi) − Φ(lo), clamped at zero. Evaluated on the tail that keeps both
/// terms small so the difference does not cancel.
double normal_interval_probability(double lo, double hi);

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x ∈ [0, 1].
double incomplete_beta(double a, double b, double x);

/// Pr(F ≤ x) for F ~ F(d1, d2).
double f_cdf(double x, double d1, double d2);

/// Pr(F > x) for F ~ F(d1, d2), computed without the 1 − cdf cancellation.
double f_survival(double x, double d1, double d2);

/// Upper-`level` quantile of F(d1, d2): the ℓ with Pr(F > ℓ) = level.
/// Throws DomainError unless 0 < level < 1 and d1, d2 > 0.
double f_upper_quantile(double level, double d1, double d2);

/// Pr(T ≤ x) for T ~ t(df).
double t_cdf(double x, double df);

/// Two-sided quantile t(df) at level alpha: Pr(T ≤ t) = 1 − alpha/2.
double t_two_sided_quantile(double alpha, double df);

}  // namespace ancova_cp::dist
