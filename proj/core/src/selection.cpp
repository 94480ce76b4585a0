#include "ancova_cp/selection.hpp"

#include <cmath>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/linalg.hpp"

namespace ancova_cp {

ScaledSufficientStats ScaledSufficientStats::from_gamma_hat(Vector gamma_hat, double d) {
  ScaledSufficientStats s;
  const Eigen::Index k = gamma_hat.size() / 2;
  s.q = gamma_hat.tail(k);
  s.gamma_hat = std::move(gamma_hat);
  s.d = d;
  return s;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::A:
      return "A";
    case Region::B:
      return "B";
    case Region::C:
      return "C";
  }
  return "?";
}

bool ScaledInterval::contains(double value) const { return std::fabs(value - center) <= half_width; }

FStatistics f_statistics(const Eigen::Ref<const Vector>& q, double d, const GeometryBundle& geom) {
  if (!(d > 0.0)) throw DomainError("f_statistics: D must be positive");
  const double m = geom.m;
  const auto k = static_cast<double>(geom.k);
  FStatistics f;
  f.f_tau = (m / k) * linalg::quad_form(geom.V22_inv, q) / d;
  f.f_xi = (m / (k - 1.0)) * linalg::differenced_quad_form(geom.W22_inv, q) / d;
  return f;
}

FStatistics f_statistics(const ScaledSufficientStats& stats, const GeometryBundle& geom) {
  return f_statistics(stats.q, stats.d, geom);
}

Region classify(const FStatistics& f, const TwoStageConfig& cfg) {
  if (f.f_tau <= cfg.l_tau) return Region::A;
  if (f.f_xi <= cfg.l_xi) return Region::B;
  return Region::C;
}

SelectionOutcome select_region(const ScaledSufficientStats& stats, const GeometryBundle& geom,
                               const TwoStageConfig& cfg) {
  const FStatistics f = f_statistics(stats, geom);
  return {classify(f, cfg), f.f_tau, f.f_xi};
}

ScaledInterval interval_tau(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg) {
  const double df = geom.m + static_cast<double>(geom.k);
  const double rss = stats.d + linalg::quad_form(geom.V22_inv, stats.q);
  return {geom.a_G_tau.dot(stats.gamma_hat), cfg.t_mk * std::sqrt(rss / df) * std::sqrt(geom.v_star)};
}

ScaledInterval interval_xi(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg) {
  const double df = geom.m + static_cast<double>(geom.k) - 1.0;
  const double rss = stats.d + linalg::differenced_quad_form(geom.W22_inv, stats.q);
  return {geom.a_G_xi.dot(stats.gamma_hat), cfg.t_mk1 * std::sqrt(rss / df) * std::sqrt(geom.w_star)};
}

ScaledInterval interval_full(const ScaledSufficientStats& stats, const GeometryBundle& geom,
                             const TwoStageConfig& cfg) {
  return {geom.a.dot(stats.gamma_hat), cfg.t_m * std::sqrt(stats.d / geom.m) * std::sqrt(geom.v11)};
}

bool covers_tau(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                const Vector& gamma) {
  return interval_tau(stats, geom, cfg).contains(geom.a.dot(gamma));
}

bool covers_xi(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
               const Vector& gamma) {
  return interval_xi(stats, geom, cfg).contains(geom.a.dot(gamma));
}

bool covers_full(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                 const Vector& gamma) {
  return interval_full(stats, geom, cfg).contains(geom.a.dot(gamma));
}

bool coverage_indicator(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                        const Vector& gamma, SelectionOutcome& outcome) {
  outcome = select_region(stats, geom, cfg);
  switch (outcome.region) {
    case Region::A:
      return covers_tau(stats, geom, cfg, gamma);
    case Region::B:
      return covers_xi(stats, geom, cfg, gamma);
    case Region::C:
      return covers_full(stats, geom, cfg, gamma);
  }
  return false;
}

bool coverage_indicator(const ScaledSufficientStats& stats, const GeometryBundle& geom, const TwoStageConfig& cfg,
                        const Vector& gamma) {
  SelectionOutcome outcome;
  return coverage_indicator(stats, geom, cfg, gamma, outcome);
}

}  // namespace ancova_cp
