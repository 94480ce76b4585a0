#pragma once

// Coverage-probability estimators.
//
// Naive: average the 0/1 coverage indicator over M simulated (γ̂, D).
// Conditioned: average p_τ + p_ξ + p over M simulated (Q, D); same
// expectation, smaller variance.
//
// Draws are split into fixed-size chunks with one counter-based stream per
// chunk; per-chunk moments are merged in chunk order, so an estimate is a
// pure function of (seed, M, point, chunk size) regardless of thread count.

#include <cstddef>
#include <cstdint>
#include <string>

#include "ancova_cp/conditional.hpp"
#include "ancova_cp/design.hpp"
#include "ancova_cp/rng.hpp"
#include "ancova_cp/selection.hpp"
#include "ancova_cp/slope_point.hpp"

namespace ancova_cp {

enum class Estimator { Naive, Conditioned };

const char* estimator_name(Estimator e);
/// Accepts "naive" and "conditioned"; throws ConfigError otherwise.
Estimator parse_estimator(const std::string& name);

struct CoverageEstimate {
  double estimate = 0.0;
  double se = 0.0;
  std::uint64_t runs = 0;
  Estimator estimator = Estimator::Naive;
  std::uint64_t seed = 0;
  SlopePoint point;
};

struct McOptions {
  std::size_t chunk_size = 2048;
  unsigned threads = 1;  ///< 0 = default_thread_count()
  /// Intercept part of γ (length k). Empty means zeros. The coverage
  /// probability does not depend on it; the override exists to check that.
  Vector intercepts;
};

/// Streaming mean/variance (Welford), mergeable in a fixed order.
struct RunningMoments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningMoments& other);
  /// Unbiased sample variance; 0 when n < 2.
  double variance() const;
};

/// χ²_m: sum of m squared normals for m ≤ 64, otherwise 2·Gamma(m/2).
double sample_chi_square(int m, rng::Philox4x32& gen);

/// γ̂ = γ + L·z with L·Lᵀ = (XᵀX)⁻¹, and D given. γ has `intercepts` (or
/// zeros) in its first k entries and the slope point in the last k.
ScaledSufficientStats assemble_stats(const SlopePoint& point, const GeometryBundle& geom,
                                     const Eigen::Ref<const Vector>& z, double d, const Vector& intercepts = {});

/// One draw of (γ̂, Q, D): 2k normals for γ̂ then D ~ χ²_m.
ScaledSufficientStats sample_stats(const SlopePoint& point, const GeometryBundle& geom, rng::Philox4x32& gen,
                                   const Vector& intercepts = {});

/// Full parameter vector γ = (intercepts, slopes).
Vector full_gamma(const SlopePoint& point, std::size_t k, const Vector& intercepts = {});

/// Throws DomainError when runs < 2 or the point has the wrong length.
CoverageEstimate estimate_naive(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                std::uint64_t runs, std::uint64_t seed, const McOptions& opts = {});
CoverageEstimate estimate_conditioned(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                      std::uint64_t runs, std::uint64_t seed, const McOptions& opts = {});
CoverageEstimate estimate(Estimator which, const SlopePoint& point, const GeometryBundle& geom,
                          const TwoStageConfig& cfg, std::uint64_t runs, std::uint64_t seed,
                          const McOptions& opts = {});

enum class Gate { Tau, Xi };

/// Monte Carlo estimate of Pr(F_τ ≤ ℓ_τ) or Pr(F_ξ ≤ ℓ_ξ) at the point.
CoverageEstimate gate_probability(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                  Gate which, std::uint64_t runs, std::uint64_t seed, const McOptions& opts = {});

/// Pr(S), Pr(S ∩ T) and Pr(Tᶜ) from one set of draws, with S the coverage
/// event and T = {F_τ ≤ ℓ_τ}. Used to check 0 ≤ Pr(S) − Pr(S ∩ T) ≤ Pr(Tᶜ).
struct SelectionGapDiagnostic {
  std::uint64_t runs = 0;
  double pr_s = 0.0;
  double pr_s_and_t = 0.0;
  double pr_t_complement = 0.0;

  double se(double p) const;
};

SelectionGapDiagnostic selection_gap_diagnostic(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                   std::uint64_t runs, std::uint64_t seed, const McOptions& opts = {});

}  // namespace ancova_cp
