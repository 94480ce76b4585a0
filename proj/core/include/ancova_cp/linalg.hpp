#pragma once

// Allocation-free helpers for the small quadratic forms evaluated once per
// simulated draw.

#include <Eigen/Dense>

namespace ancova_cp::linalg {

/// xᵀ M x for symmetric M.
inline double quad_form(const Eigen::MatrixXd& M, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) col += M(i, j) * x(i);
    s += col * x(j);
  }
  return s;
}

/// (Uq)ᵀ W (Uq) with U = [1 | −I], i.e. (Uq)_i = q_0 − q_{i+1}.
inline double differenced_quad_form(const Eigen::MatrixXd& W, const Eigen::Ref<const Eigen::VectorXd>& q) {
  const Eigen::Index n = q.size() - 1;
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) col += W(i, j) * (q(0) - q(i + 1));
    s += col * (q(0) - q(j + 1));
  }
  return s;
}

}  // namespace ancova_cp::linalg
