#pragma once

// Brute-force raw-data pipeline: simulate Y = Xβ + ε, fit the full model by
// least squares, obtain the constrained fits as G·β̂, run both F tests on raw
// residual sums of squares and build the three intervals from raw formulas.
// Nothing here reuses the scale-free shortcuts of the selection module, so it
// serves as ground truth for them.

#include <cstdint>

#include "ancova_cp/design.hpp"
#include "ancova_cp/montecarlo.hpp"
#include "ancova_cp/rng.hpp"
#include "ancova_cp/selection.hpp"

namespace ancova_cp {

struct RawFit {
  Vector y;
  Vector beta_hat;
  double rss_full = 0.0;
  Vector beta_tau;  ///< G_τβ̂
  double rss_tau = 0.0;
  Vector beta_xi;   ///< G_ξβ̂
  double rss_xi = 0.0;
  double sigma2_hat = 0.0;  ///< rss_full / m
};

/// Interval [lower, upper] for θ in the units of y.
struct RawInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double value) const { return lower <= value && value <= upper; }
};

struct RawDecision {
  FStatistics f;
  Region region = Region::A;
  RawInterval interval_tau;
  RawInterval interval_xi;
  RawInterval interval_full;
  bool covered = false;

  const RawInterval& selected() const;
};

/// Least squares on the observed y.
RawFit fit_raw(const GeometryBundle& geom, const Vector& y);

/// ε iid N(0, σ²) from gen; zero_noise gives y = Xβ exactly.
/// Throws DomainError unless sigma > 0 and beta has 2k entries.
RawFit simulate_and_fit(const Vector& beta, double sigma, const GeometryBundle& geom, rng::Philox4x32& gen,
                        bool zero_noise = false);

/// F tests from (R(β̂_constrained) − R(β̂))/df ÷ R(β̂)/m, intervals from raw
/// residual sums of squares, coverage of θ = aᵀβ.
RawDecision raw_decision(const RawFit& fit, const Vector& beta, const GeometryBundle& geom, const TwoStageConfig& cfg);

/// Empirical coverage of the two-stage interval over `runs` raw simulations.
/// Streams are keyed by the seed only, so (β, σ) and (cβ, cσ) share noise up
/// to the scale factor. Throws DomainError when runs < 2.
CoverageEstimate estimate_cp_raw(const Vector& beta, double sigma, const GeometryBundle& geom,
                                 const TwoStageConfig& cfg, std::uint64_t runs, std::uint64_t seed,
                                 const McOptions& opts = {});

/// Run-for-run comparison with the naive estimator. Each run consumes the
/// naive estimator's stream (2k normals for γ̂ then the χ²_m draw) and turns
/// it into raw noise ε = σ(X·L·z + N·w), with L·Lᵀ = (XᵀX)⁻¹ and N an
/// orthonormal basis of the residual space, so that β̂ = β + σLz and
/// R(β̂) = σ²D exactly. For m > 64 the χ²_m draw is a single gamma variate
/// and w is placed along the first basis column.
struct CrossCheckReport {
  std::uint64_t runs = 0;
  std::uint64_t agreements = 0;
  double naive_estimate = 0.0;  ///< equals estimate_naive at the same seed and chunk size
  double raw_estimate = 0.0;
  double max_rss_identity_error = 0.0;  ///< relative, R(β̂_τ) and R(β̂_ξ) vs their quadratic forms
  double max_f_error = 0.0;             ///< relative, raw F vs scale-free F
  double max_interval_error = 0.0;      ///< relative, raw endpoints / σ vs scale-free endpoints

  double agreement_rate() const { return runs == 0 ? 0.0 : static_cast<double>(agreements) / static_cast<double>(runs); }
};

CrossCheckReport cross_check(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                             std::uint64_t runs, std::uint64_t seed, double sigma = 1.0, const McOptions& opts = {});

}  // namespace ancova_cp
