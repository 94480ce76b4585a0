#pragma once

// The two-stage F-test procedure and the three confidence intervals,
// expressed in scale-free units: γ̂ = β̂/σ, Q = τ̂/σ, D = mΣ̂²/σ².

#include <cstddef>

#include "ancova_cp/design.hpp"

namespace ancova_cp {

struct ScaledSufficientStats {
  Vector gamma_hat;  ///< β̂/σ, length 2k
  Vector q;          ///< slope part of gamma_hat
  double d = 0.0;    ///< mΣ̂²/σ²

  static ScaledSufficientStats from_gamma_hat(Vector gamma_hat, double d);
};

/// A: Stage 1 accepts (all slopes zero). B: Stage 1 rejects, Stage 2 accepts
/// (equal slopes). C: both reject (full model).
enum class Region { A, B, C };

const char* region_name(Region r);

struct FStatistics {
  double f_tau = 0.0;
  double f_xi = 0.0;
};

struct SelectionOutcome {
  Region region = Region::A;
  double f_tau = 0.0;
  double f_xi = 0.0;
};

/// Interval [center ± half_width] for θ/σ.
struct ScaledInterval {
  double center = 0.0;
  double half_width = 0.0;

  bool contains(double value) const;
  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
};

/// Throws DomainError unless d > 0.
FStatistics f_statistics(const Eigen::Ref<const Vector>& q, double d, const GeometryBundle& geom);
FStatistics f_statistics(const ScaledSufficientStats& stats, const GeometryBundle& geom);

/// F = ℓ counts as accepting the null hypothesis.
Region classify(const FStatistics& f, const TwoStageConfig& cfg);
SelectionOutcome select_region(const ScaledSufficientStats& stats, const GeometryBundle& geom,
                               const TwoStageConfig& cfg);

/// Constrained fit τ = 0: [aᵀG_τγ̂ ± t(m+k)·√((D + QᵀV22⁻¹Q)/(m+k))·√v*].
ScaledInterval interval_tau(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg);
/// Constrained fit ξ = 0: [aᵀG_ξγ̂ ± t(m+k−1)·√((D + (UQ)ᵀW22⁻¹UQ)/(m+k−1))·√w*].
ScaledInterval interval_xi(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg);
/// Full model: [aᵀγ̂ ± t(m)·√(D/m)·√v11].
ScaledInterval interval_full(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg);

// Coverage events, with gamma the true β/σ. Intervals are closed.
bool covers_tau(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                const Vector& gamma);
bool covers_xi(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
               const Vector& gamma);
bool covers_full(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                 const Vector& gamma);

/// Coverage of the interval chosen by the two-stage procedure.
bool coverage_indicator(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                        const Vector& gamma);

/// Same as coverage_indicator, also reporting which region was selected.
bool coverage_indicator(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                        const Vector& gamma, SelectionOutcome& outcome);

}  // namespace ancova_cp
