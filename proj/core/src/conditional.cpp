#include "ancova_cp/conditional.hpp"

#include <cmath>

#include "ancova_cp/distributions.hpp"
#include "ancova_cp/errors.hpp"
#include "ancova_cp/linalg.hpp"

namespace ancova_cp {

ConditionalKernel::ConditionalKernel(GeometryBundle geom, TwoStageConfig cfg, SlopePoint slopes)
    : geom_(std::move(geom)), cfg_(cfg), slopes_(std::move(slopes)) {
  if (slopes_.size() != geom_.k) throw DomainError("slope point must have k entries");

  v21_weights_ = geom_.V22_inv * geom_.v21;
  s21_weights_ = geom_.V22_inv * geom_.s21;
  tau_shift_ = v21_weights_.dot(slopes_.values);
  const Vector xi = geom_.U * slopes_.values;
  xi_shift_ = (geom_.W22_inv * geom_.w21).dot(xi);

  const double cond_var = geom_.conditional_variance_xi();
  if (!(cond_var > 0.0)) throw ConditioningFailure("w* − s21ᵀV22⁻¹s21 must be positive");
  sd_v_star_ = std::sqrt(geom_.v_star);
  sd_xi_cond_ = std::sqrt(cond_var);
  sqrt_w_star_ = std::sqrt(geom_.w_star);
  sqrt_v11_ = std::sqrt(geom_.v11);
}

double ConditionalKernel::weighted_gap(const Vector& h, const Eigen::Ref<const Vector>& q) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) s += h(i) * (slopes_.values(i) - q(i));
  return s;
}

double ConditionalKernel::tau_term(const Eigen::Ref<const Vector>& q, double d) const {
  const double df = geom_.m + static_cast<double>(geom_.k);
  const double e = cfg_.t_mk * std::sqrt((d + linalg::quad_form(geom_.V22_inv, q)) / df) * sd_v_star_;
  return dist::normal_interval_probability((tau_shift_ - e) / sd_v_star_, (tau_shift_ + e) / sd_v_star_);
}

double ConditionalKernel::xi_term(const Eigen::Ref<const Vector>& q, double d) const {
  const double df = geom_.m + static_cast<double>(geom_.k) - 1.0;
  const double e =
      cfg_.t_mk1 * std::sqrt((d + linalg::differenced_quad_form(geom_.W22_inv, q)) / df) * sqrt_w_star_;
  const double shift = xi_shift_ + weighted_gap(s21_weights_, q);
  return dist::normal_interval_probability((shift - e) / sd_xi_cond_, (shift + e) / sd_xi_cond_);
}

double ConditionalKernel::full_term(const Eigen::Ref<const Vector>& q, double d) const {
  const double e = cfg_.t_m * std::sqrt(d / geom_.m) * sqrt_v11_;
  const double shift = weighted_gap(v21_weights_, q);
  return dist::normal_interval_probability((shift - e) / sd_v_star_, (shift + e) / sd_v_star_);
}

ConditionalKernel::Terms ConditionalKernel::evaluate(const Eigen::Ref<const Vector>& q, double d) const {
  Terms t;
  t.region = classify(f_statistics(q, d, geom_), cfg_);
  switch (t.region) {
    case Region::A:
      t.p_tau = tau_term(q, d);
      break;
    case Region::B:
      t.p_xi = xi_term(q, d);
      break;
    case Region::C:
      t.p_full = full_term(q, d);
      break;
  }
  return t;
}

double ConditionalKernel::p_tau(const Eigen::Ref<const Vector>& q, double d) const { return evaluate(q, d).p_tau; }

double ConditionalKernel::p_xi(const Eigen::Ref<const Vector>& q, double d) const { return evaluate(q, d).p_xi; }

double ConditionalKernel::p_full(const Eigen::Ref<const Vector>& q, double d) const { return evaluate(q, d).p_full; }

double ConditionalKernel::conditional_cp(const Eigen::Ref<const Vector>& q, double d) const {
  return evaluate(q, d).total();
}

}  // namespace ancova_cp
