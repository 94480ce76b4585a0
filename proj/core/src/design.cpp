#include "ancova_cp/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ancova_cp/distributions.hpp"
#include "ancova_cp/errors.hpp"

namespace ancova_cp {
namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Inverse of a symmetric positive-definite matrix. A failed or near-zero
// pivot relative to the largest diagonal entry counts as singular.
bool spd_inverse(const Matrix& m, Matrix& inverse, Matrix* lower = nullptr) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const double max_diag = m.diagonal().cwiseAbs().maxCoeff();
  const Matrix L = llt.matrixL();
  const double tol = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * max_diag;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    if (!(L(i, i) * L(i, i) > tol)) return false;
  }
  inverse = symmetrized(llt.solve(Matrix::Identity(m.rows(), m.cols())));
  if (lower != nullptr) *lower = L;
  return true;
}

}  // namespace

AncovaLayout::AncovaLayout(std::vector<std::vector<double>> covariates) : x_(std::move(covariates)) {
  if (x_.empty()) throw ConfigError("layout needs at least one treatment");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (x_[i].empty()) throw ConfigError("treatment " + std::to_string(i + 1) + " has no replicates");
    for (double v : x_[i]) {
      if (!std::isfinite(v)) throw ConfigError("non-finite covariate in treatment " + std::to_string(i + 1));
    }
  }
}

std::vector<std::size_t> AncovaLayout::replicate_counts() const {
  std::vector<std::size_t> n;
  n.reserve(x_.size());
  for (const auto& g : x_) n.push_back(g.size());
  return n;
}

std::size_t AncovaLayout::observations() const {
  std::size_t n = 0;
  for (const auto& g : x_) n += g.size();
  return n;
}

int AncovaLayout::residual_df() const {
  return static_cast<int>(observations()) - 2 * static_cast<int>(treatments());
}

double AncovaLayout::grand_mean() const {
  double sum = 0.0;
  for (const auto& g : x_) sum = std::accumulate(g.begin(), g.end(), sum);
  return sum / static_cast<double>(observations());
}

double AncovaLayout::max_abs_centered() const {
  const double xbar = grand_mean();
  double best = 0.0;
  for (const auto& g : x_) {
    for (double v : g) best = std::max(best, std::fabs(v - xbar));
  }
  return best;
}

ContrastSpec ContrastSpec::treatment_difference(std::size_t k, std::size_t i, std::size_t j, double centered_x) {
  if (i >= k || j >= k || i == j) throw ConfigError("contrast treatments must be two distinct indices in 1..k");
  ContrastSpec c;
  c.a = Vector::Zero(static_cast<Eigen::Index>(2 * k));
  c.a(i) = 1.0;
  c.a(j) = -1.0;
  c.a(k + i) = centered_x;
  c.a(k + j) = -centered_x;
  return c;
}

double GeometryBundle::conditional_variance_xi() const { return w_star - s21.dot(V22_inv * s21); }

TwoStageConfig TwoStageConfig::with_thresholds(double tau_threshold, double xi_threshold) const {
  TwoStageConfig c = *this;
  c.l_tau = tau_threshold;
  c.l_xi = xi_threshold;
  return c;
}

Matrix selector_tau(std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix c = Matrix::Zero(2 * kk, kk);
  c.bottomRows(kk).setIdentity();
  return c;
}

Matrix differencing_matrix(std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix u = Matrix::Zero(kk - 1, kk);
  u.col(0).setOnes();
  u.rightCols(kk - 1) = -Matrix::Identity(kk - 1, kk - 1);
  return u;
}

Matrix selector_xi(std::size_t k) { return selector_tau(k) * differencing_matrix(k).transpose(); }

Matrix build_design(const AncovaLayout& layout) {
  const std::size_t k = layout.treatments();
  const double xbar = layout.grand_mean();
  Matrix X = Matrix::Zero(static_cast<Eigen::Index>(layout.observations()), static_cast<Eigen::Index>(2 * k));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (double v : layout.covariates()[i]) {
      X(row, static_cast<Eigen::Index>(i)) = 1.0;
      X(row, static_cast<Eigen::Index>(k + i)) = v - xbar;
      ++row;
    }
  }
  Matrix inv;
  if (!spd_inverse(X.transpose() * X, inv)) {
    throw SingularDesign("XᵀX is not positive definite; every treatment needs at least two distinct covariate values");
  }
  return X;
}

GeometryBundle build_geometry(const AncovaLayout& layout, const ContrastSpec& contrast) {
  const std::size_t k = layout.treatments();
  if (k < 2) throw DomainError("the two-stage procedure needs at least two treatments");
  if (layout.residual_df() < 1) throw DomainError("need n − 2k ≥ 1 residual degrees of freedom");
  if (contrast.a.size() != static_cast<Eigen::Index>(2 * k)) throw DomainError("contrast must have length 2k");

  GeometryBundle g;
  g.k = k;
  g.m = layout.residual_df();
  g.a = contrast.a;
  g.X = build_design(layout);

  if (!spd_inverse(g.X.transpose() * g.X, g.XtX_inv)) throw SingularDesign("XᵀX is not positive definite");
  {
    Eigen::LLT<Matrix> llt(g.XtX_inv);
    if (llt.info() != Eigen::Success) throw ConditioningFailure("(XᵀX)⁻¹ has no Cholesky factor");
    g.XtX_inv_chol = llt.matrixL();
  }

  g.C_tau = selector_tau(k);
  g.C_xi = selector_xi(k);
  g.U = differencing_matrix(k);

  g.V22 = symmetrized(g.C_tau.transpose() * g.XtX_inv * g.C_tau);
  g.W22 = symmetrized(g.C_xi.transpose() * g.XtX_inv * g.C_xi);
  if (!spd_inverse(g.V22, g.V22_inv, &g.V22_chol)) throw ConditioningFailure("V22 is not positive definite");
  if (!spd_inverse(g.W22, g.W22_inv)) throw ConditioningFailure("W22 is not positive definite");

  const Vector xtx_inv_a = g.XtX_inv * g.a;
  g.v21 = g.C_tau.transpose() * xtx_inv_a;
  g.w21 = g.C_xi.transpose() * xtx_inv_a;
  g.v11 = g.a.dot(xtx_inv_a);
  g.v_star = g.v11 - g.v21.dot(g.V22_inv * g.v21);
  g.w_star = g.v11 - g.w21.dot(g.W22_inv * g.w21);
  g.s21 = g.v21 - g.C_tau.transpose() * g.XtX_inv * g.C_xi * (g.W22_inv * g.w21);

  const Matrix I = Matrix::Identity(static_cast<Eigen::Index>(2 * k), static_cast<Eigen::Index>(2 * k));
  g.G_tau = I - g.XtX_inv * g.C_tau * g.V22_inv * g.C_tau.transpose();
  g.G_xi = I - g.XtX_inv * g.C_xi * g.W22_inv * g.C_xi.transpose();
  g.a_G_tau = g.G_tau.transpose() * g.a;
  g.a_G_xi = g.G_xi.transpose() * g.a;

  const double floor = 1e-12 * std::max(g.v11, std::numeric_limits<double>::min());
  if (!(g.v11 > 0.0)) throw ConditioningFailure("contrast has zero variance (v11 = 0)");
  if (!(g.v_star > floor)) throw ConditioningFailure("v* is not positive for this contrast");
  if (!(g.w_star > floor)) throw ConditioningFailure("w* is not positive for this contrast");
  if (!(g.conditional_variance_xi() > floor)) throw ConditioningFailure("w* − s21ᵀV22⁻¹s21 is not positive");
  return g;
}

TwoStageConfig critical_values(const AncovaLayout& layout, double alpha, double sig_tau, double sig_xi) {
  const auto k = static_cast<double>(layout.treatments());
  const int m = layout.residual_df();
  if (layout.treatments() < 2) throw DomainError("critical values need k ≥ 2");
  if (m < 1) throw DomainError("critical values need m = n − 2k ≥ 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(sig_tau > 0.0 && sig_tau < 1.0)) throw DomainError("sig_tau must lie in (0, 1)");
  if (!(sig_xi > 0.0 && sig_xi < 1.0)) throw DomainError("sig_xi must lie in (0, 1)");

  TwoStageConfig c;
  c.alpha = alpha;
  c.sig_tau = sig_tau;
  c.sig_xi = sig_xi;
  c.l_tau = dist::f_upper_quantile(sig_tau, k, m);
  c.l_xi = dist::f_upper_quantile(sig_xi, k - 1.0, m);
  c.t_m = dist::t_two_sided_quantile(alpha, m);
  c.t_mk = dist::t_two_sided_quantile(alpha, m + k);
  c.t_mk1 = dist::t_two_sided_quantile(alpha, m + k - 1.0);
  return c;
}

}  // namespace ancova_cp
