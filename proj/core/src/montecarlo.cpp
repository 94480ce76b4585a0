#include "ancova_cp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/parallel.hpp"

namespace ancova_cp {
namespace {

constexpr int kChiSquareSumLimit = 64;

void require_runs(std::uint64_t runs) {
  if (runs < 2) throw DomainError("need at least two simulation runs");
}

void require_point(const SlopePoint& point, const GeometryBundle& geom) {
  if (point.size() != geom.k) throw DomainError("slope point must have k = " + std::to_string(geom.k) + " entries");
  if (!point.values.allFinite()) throw DomainError("slope point must be finite");
}

// Runs draw(gen, moments) for every run of every chunk and merges the
// per-chunk moments in chunk order.
template <class DrawChunk>
RunningMoments run_chunks(std::uint64_t runs, const McOptions& opts, DrawChunk&& draw_chunk) {
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_size);
  const std::size_t chunks = static_cast<std::size_t>((runs + chunk - 1) / chunk);
  std::vector<RunningMoments> partial(chunks);
  parallel_for(chunks, opts.threads, [&](std::size_t c) {
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk;
    const std::uint64_t count = std::min<std::uint64_t>(chunk, runs - begin);
    partial[c] = draw_chunk(static_cast<std::uint64_t>(c), count);
  });
  RunningMoments total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

CoverageEstimate bernoulli_estimate(const RunningMoments& m, Estimator e, std::uint64_t seed,
                                    const SlopePoint& point) {
  CoverageEstimate out;
  out.runs = m.n;
  out.estimate = m.mean;
  out.se = std::sqrt(std::max(0.0, m.mean * (1.0 - m.mean)) / static_cast<double>(m.n));
  out.estimator = e;
  out.seed = seed;
  out.point = point;
  return out;
}

Vector resolved_intercepts(const Vector& intercepts, std::size_t k) {
  if (intercepts.size() == 0) return Vector::Zero(static_cast<Eigen::Index>(k));
  if (intercepts.size() != static_cast<Eigen::Index>(k)) throw DomainError("intercept override must have k entries");
  return intercepts;
}

}  // namespace

const char* estimator_name(Estimator e) { return e == Estimator::Naive ? "naive" : "conditioned"; }

Estimator parse_estimator(const std::string& name) {
  if (name == "naive") return Estimator::Naive;
  if (name == "conditioned") return Estimator::Conditioned;
  throw ConfigError("unknown estimator '" + name + "' (expected naive or conditioned)");
}

void RunningMoments::add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (x - mean);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double delta = other.mean - mean;
  const double total = na + nb;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

double RunningMoments::variance() const { return n < 2 ? 0.0 : m2 / static_cast<double>(n - 1); }

double sample_chi_square(int m, rng::Philox4x32& gen) {
  if (m <= kChiSquareSumLimit) {
    std::normal_distribution<double> normal;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double z = normal(gen);
      s += z * z;
    }
    return s;
  }
  std::gamma_distribution<double> gamma(0.5 * m, 2.0);
  return gamma(gen);
}

Vector full_gamma(const SlopePoint& point, std::size_t k, const Vector& intercepts) {
  Vector gamma(static_cast<Eigen::Index>(2 * k));
  gamma.head(static_cast<Eigen::Index>(k)) = resolved_intercepts(intercepts, k);
  gamma.tail(static_cast<Eigen::Index>(k)) = point.values;
  return gamma;
}

ScaledSufficientStats assemble_stats(const SlopePoint& point, const GeometryBundle& geom,
                                     const Eigen::Ref<const Vector>& z, double d, const Vector& intercepts) {
  Vector gamma_hat = full_gamma(point, geom.k, intercepts);
  gamma_hat.noalias() += geom.XtX_inv_chol.triangularView<Eigen::Lower>() * z;
  return ScaledSufficientStats::from_gamma_hat(std::move(gamma_hat), d);
}

ScaledSufficientStats sample_stats(const SlopePoint& point, const GeometryBundle& geom, rng::Philox4x32& gen,
                                   const Vector& intercepts) {
  std::normal_distribution<double> normal;
  Vector z(static_cast<Eigen::Index>(2 * geom.k));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(gen);
  const double d = sample_chi_square(geom.m, gen);
  return assemble_stats(point, geom, z, d, intercepts);
}

CoverageEstimate estimate_naive(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                std::uint64_t runs, std::uint64_t seed, const McOptions& opts) {
  require_runs(runs);
  require_point(point, geom);
  const Vector gamma = full_gamma(point, geom.k, opts.intercepts);
  const Eigen::Index dim = gamma.size();
  const std::uint64_t point_hash = point.hash();

  const RunningMoments m = run_chunks(runs, opts, [&](std::uint64_t chunk, std::uint64_t count) {
    auto gen = rng::make_stream(seed, point_hash, rng::Purpose::Naive, chunk);
    std::normal_distribution<double> normal;
    Vector z(dim);
    ScaledSufficientStats stats;
    stats.gamma_hat.resize(dim);
    RunningMoments local;
    for (std::uint64_t r = 0; r < count; ++r) {
      for (Eigen::Index i = 0; i < dim; ++i) z(i) = normal(gen);
      stats.d = sample_chi_square(geom.m, gen);
      stats.gamma_hat = gamma;
      stats.gamma_hat.noalias() += geom.XtX_inv_chol.triangularView<Eigen::Lower>() * z;
      stats.q = stats.gamma_hat.tail(dim / 2);
      local.add(coverage_indicator(stats, geom, cfg, gamma) ? 1.0 : 0.0);
    }
    return local;
  });
  return bernoulli_estimate(m, Estimator::Naive, seed, point);
}

CoverageEstimate estimate_conditioned(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                      std::uint64_t runs, std::uint64_t seed, const McOptions& opts) {
  require_runs(runs);
  require_point(point, geom);
  // The kernel never sees the intercepts; validate the override anyway.
  resolved_intercepts(opts.intercepts, geom.k);
  const ConditionalKernel kernel(geom, cfg, point);
  const auto k = static_cast<Eigen::Index>(geom.k);
  const std::uint64_t point_hash = point.hash();

  const RunningMoments m = run_chunks(runs, opts, [&](std::uint64_t chunk, std::uint64_t count) {
    auto gen = rng::make_stream(seed, point_hash, rng::Purpose::Conditioned, chunk);
    std::normal_distribution<double> normal;
    Vector z(k);
    Vector q(k);
    RunningMoments local;
    for (std::uint64_t r = 0; r < count; ++r) {
      for (Eigen::Index i = 0; i < k; ++i) z(i) = normal(gen);
      const double d = sample_chi_square(geom.m, gen);
      q = point.values;
      q.noalias() += geom.V22_chol.triangularView<Eigen::Lower>() * z;
      local.add(kernel.conditional_cp(q, d));
    }
    return local;
  });

  CoverageEstimate out;
  out.runs = m.n;
  out.estimate = std::clamp(m.mean, 0.0, 1.0);
  out.se = std::sqrt(m.variance() / static_cast<double>(m.n));
  out.estimator = Estimator::Conditioned;
  out.seed = seed;
  out.point = point;
  return out;
}

CoverageEstimate estimate(Estimator which, const SlopePoint& point, const GeometryBundle& geom,
                          const TwoStageConfig& cfg, std::uint64_t runs, std::uint64_t seed, const McOptions& opts) {
  return which == Estimator::Naive ? estimate_naive(point, geom, cfg, runs, seed, opts)
                                   : estimate_conditioned(point, geom, cfg, runs, seed, opts);
}

CoverageEstimate gate_probability(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                  Gate which, std::uint64_t runs, std::uint64_t seed, const McOptions& opts) {
  require_runs(runs);
  require_point(point, geom);
  const auto k = static_cast<Eigen::Index>(geom.k);
  const std::uint64_t point_hash = point.hash();

  const RunningMoments m = run_chunks(runs, opts, [&](std::uint64_t chunk, std::uint64_t count) {
    auto gen = rng::make_stream(seed, point_hash, rng::Purpose::Gate, chunk);
    std::normal_distribution<double> normal;
    Vector z(k);
    Vector q(k);
    RunningMoments local;
    for (std::uint64_t r = 0; r < count; ++r) {
      for (Eigen::Index i = 0; i < k; ++i) z(i) = normal(gen);
      const double d = sample_chi_square(geom.m, gen);
      q = point.values;
      q.noalias() += geom.V22_chol.triangularView<Eigen::Lower>() * z;
      const FStatistics f = f_statistics(q, d, geom);
      const bool accepted = which == Gate::Tau ? f.f_tau <= cfg.l_tau : f.f_xi <= cfg.l_xi;
      local.add(accepted ? 1.0 : 0.0);
    }
    return local;
  });
  return bernoulli_estimate(m, Estimator::Naive, seed, point);
}

double SelectionGapDiagnostic::se(double p) const {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(runs));
}

SelectionGapDiagnostic selection_gap_diagnostic(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                                   std::uint64_t runs, std::uint64_t seed, const McOptions& opts) {
  require_runs(runs);
  require_point(point, geom);
  const Vector gamma = full_gamma(point, geom.k, opts.intercepts);
  const std::uint64_t point_hash = point.hash();

  struct Counts {
    std::uint64_t s = 0, st = 0, tc = 0;
  };
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_size);
  const std::size_t chunks = static_cast<std::size_t>((runs + chunk - 1) / chunk);
  std::vector<Counts> partial(chunks);
  parallel_for(chunks, opts.threads, [&](std::size_t c) {
    auto gen = rng::make_stream(seed, point_hash, rng::Purpose::SelectionGap, c);
    const std::uint64_t count = std::min<std::uint64_t>(chunk, runs - static_cast<std::uint64_t>(c) * chunk);
    Counts local;
    for (std::uint64_t r = 0; r < count; ++r) {
      const ScaledSufficientStats stats = sample_stats(point, geom, gen, opts.intercepts);
      SelectionOutcome outcome;
      const bool covered = coverage_indicator(stats, geom, cfg, gamma, outcome);
      const bool t = outcome.f_tau <= cfg.l_tau;
      local.s += covered;
      local.st += covered && t;
      local.tc += !t;
    }
    partial[c] = local;
  });

  Counts total;
  for (const auto& p : partial) {
    total.s += p.s;
    total.st += p.st;
    total.tc += p.tc;
  }
  const double n = static_cast<double>(runs);
  return {runs, static_cast<double>(total.s) / n, static_cast<double>(total.st) / n, static_cast<double>(total.tc) / n};
}

}  // namespace ancova_cp
