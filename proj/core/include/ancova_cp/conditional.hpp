#pragma once

// Closed-form coverage probabilities conditional on (Q, D) = (q, d):
//
//   p_τ(q, d) = Pr(θ ∈ I_τ, A | Q = q, D = d)
//   p_ξ(q, d) = Pr(θ ∈ I_ξ, B | Q = q, D = d)
//   p(q, d)   = Pr(θ ∈ I,   C | Q = q, D = d)
//
// Given Q = q the region is fixed, and the interval centre is normal with a
// mean that depends on q and the true slopes, so each term is a difference of
// two normal distribution function values. Their sum has expectation equal
// to the coverage probability and never more variance than the 0/1 indicator.

#include "ancova_cp/design.hpp"
#include "ancova_cp/selection.hpp"
#include "ancova_cp/slope_point.hpp"

namespace ancova_cp {

class ConditionalKernel {
 public:
  struct Terms {
    Region region = Region::A;
    double p_tau = 0.0;
    double p_xi = 0.0;
    double p_full = 0.0;

    double total() const { return p_tau + p_xi + p_full; }
  };

  /// Throws DomainError if the slope vector has the wrong length and
  /// ConditioningFailure if the conditional variance for p_ξ is not positive.
  ConditionalKernel(GeometryBundle geom, TwoStageConfig cfg, SlopePoint slopes);

  // Each throws DomainError when d ≤ 0.
  double p_tau(const Eigen::Ref<const Vector>& q, double d) const;
  double p_xi(const Eigen::Ref<const Vector>& q, double d) const;
  double p_full(const Eigen::Ref<const Vector>& q, double d) const;

  /// p_τ + p_ξ + p; exactly one term is evaluated.
  double conditional_cp(const Eigen::Ref<const Vector>& q, double d) const;
  Terms evaluate(const Eigen::Ref<const Vector>& q, double d) const;

  const GeometryBundle& geometry() const { return geom_; }
  const TwoStageConfig& config() const { return cfg_; }
  const SlopePoint& slopes() const { return slopes_; }

 private:
  double tau_term(const Eigen::Ref<const Vector>& q, double d) const;
  double xi_term(const Eigen::Ref<const Vector>& q, double d) const;
  double full_term(const Eigen::Ref<const Vector>& q, double d) const;
  // hᵀ(τ/σ − q)
  double weighted_gap(const Vector& h, const Eigen::Ref<const Vector>& q) const;

  GeometryBundle geom_;
  TwoStageConfig cfg_;
  SlopePoint slopes_;

  Vector v21_weights_;  // V22⁻¹v21
  Vector s21_weights_;  // V22⁻¹s21
  double tau_shift_ = 0.0;     // v21ᵀV22⁻¹(τ/σ)
  double xi_shift_ = 0.0;      // w21ᵀW22⁻¹(ξ/σ)
  double sd_v_star_ = 0.0;     // √v*
  double sd_xi_cond_ = 0.0;    // √(w* − s21ᵀV22⁻¹s21)
  double sqrt_w_star_ = 0.0;
  double sqrt_v11_ = 0.0;
};

}  // namespace ancova_cp
