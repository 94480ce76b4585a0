#pragma once

// One-way ANCOVA layout, its 2k-column design matrix, and every quantity
// derived from the design that the tests, intervals and conditional
// probabilities need. Parameters are ordered β = (a_1..a_k, b_1..b_k).

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ancova_cp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Treatments with their covariate values x_ij. The replicate counts n_i are
/// the sizes of the per-treatment groups.
class AncovaLayout {
 public:
  AncovaLayout() = default;
  /// Throws ConfigError on an empty layout, an empty group or a non-finite value.
  explicit AncovaLayout(std::vector<std::vector<double>> covariates);

  std::size_t treatments() const { return x_.size(); }
  std::size_t replicates(std::size_t i) const { return x_.at(i).size(); }
  std::vector<std::size_t> replicate_counts() const;
  std::size_t observations() const;
  /// m = n − 2k. May be ≤ 0 for layouts that can only be used to build X.
  int residual_df() const;
  /// Mean of all n covariate values.
  double grand_mean() const;
  /// max |x_ij − x̄|.
  double max_abs_centered() const;
  const std::vector<std::vector<double>>& covariates() const { return x_; }

 private:
  std::vector<std::vector<double>> x_;
};

/// Coefficients a of θ = aᵀβ.
struct ContrastSpec {
  Vector a;

  /// θ = E(Y*_i) − E(Y*_j) at a common covariate value with x* − x̄ = centered_x.
  /// Treatments are 0-based here.
  static ContrastSpec treatment_difference(std::size_t k, std::size_t i, std::size_t j, double centered_x);
};

/// Design-derived matrices and scalars, all in units of σ² = 1.
struct GeometryBundle {
  std::size_t k = 0;
  int m = 0;
  Vector a;

  Matrix X;
  Matrix XtX_inv;
  Matrix C_tau;  ///< 2k×k, C_τᵀβ = (b_1..b_k)
  Matrix C_xi;   ///< 2k×(k−1), C_ξᵀβ = (b_1 − b_2, .., b_1 − b_k)
  Matrix U;      ///< (k−1)×k, [1 | −I]

  Matrix V22;
  Matrix W22;
  Vector v21;
  Vector w21;
  double v11 = 0.0;
  double v_star = 0.0;
  double w_star = 0.0;
  Vector s21;
  Matrix G_tau;
  Matrix G_xi;

  // Factorizations and products reused by the samplers and quadratic forms.
  Vector a_G_tau;  ///< G_τᵀa, so aᵀG_τγ̂ = a_G_tau·γ̂
  Vector a_G_xi;   ///< G_ξᵀa
  Matrix V22_inv;
  Matrix W22_inv;
  Matrix XtX_inv_chol;  ///< lower L with L·Lᵀ = (XᵀX)⁻¹
  Matrix V22_chol;      ///< lower L with L·Lᵀ = V22

  /// w* − s21ᵀV22⁻¹s21, the variance of aᵀG_ξγ̂ given Q.
  double conditional_variance_xi() const;
};

/// Test thresholds and interval quantiles of the two-stage procedure.
struct TwoStageConfig {
  double alpha = 0.05;
  double sig_tau = 0.10;
  double sig_xi = 0.10;
  double l_tau = 0.0;
  double l_xi = 0.0;
  double t_m = 0.0;
  double t_mk = 0.0;
  double t_mk1 = 0.0;

  /// Copy with the F-test thresholds replaced; used for degenerate
  /// procedures (ℓ = 0 always rejects, ℓ = ∞ never rejects).
  TwoStageConfig with_thresholds(double tau_threshold, double xi_threshold) const;
};

Matrix selector_tau(std::size_t k);
Matrix selector_xi(std::size_t k);
Matrix differencing_matrix(std::size_t k);

/// Row (i, j) holds 1 in column i and x_ij − x̄ in column k + i.
/// Throws SingularDesign when XᵀX is not positive definite.
Matrix build_design(const AncovaLayout& layout);

/// Requires k ≥ 2 and m ≥ 1 (DomainError otherwise); SingularDesign or
/// ConditioningFailure when an inverse does not exist.
GeometryBundle build_geometry(const AncovaLayout& layout, const ContrastSpec& contrast);

/// ℓ_τ, ℓ_ξ as upper quantiles of F(k, m), F(k − 1, m) and the t quantiles
/// t(m), t(m + k), t(m + k − 1) at 1 − α/2.
TwoStageConfig critical_values(const AncovaLayout& layout, double alpha, double sig_tau, double sig_xi);

}  // namespace ancova_cp
