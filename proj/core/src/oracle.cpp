#include "ancova_cp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/parallel.hpp"

namespace ancova_cp {
namespace {

constexpr int kChiSquareSumLimit = 64;

double rss(const Matrix& X, const Vector& y, const Vector& beta) { return (y - X * beta).squaredNorm(); }

double relative_error(double got, double want) {
  const double scale = std::max({std::fabs(want), std::fabs(got), 1e-300});
  return std::fabs(got - want) / scale;
}

RawInterval raw_interval(double center, double quantile, double variance_estimate, double design_variance) {
  const double h = quantile * std::sqrt(variance_estimate) * std::sqrt(design_variance);
  return {center - h, center + h};
}

void require_beta(const Vector& beta, double sigma, const GeometryBundle& geom) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
  if (beta.size() != static_cast<Eigen::Index>(2 * geom.k)) throw DomainError("beta must have 2k entries");
  if (!beta.allFinite()) throw DomainError("beta must be finite");
}

struct ResidualBasis {
  Matrix N;  // n×m, orthonormal, orthogonal to the columns of X
};

ResidualBasis residual_basis(const GeometryBundle& geom) {
  const Eigen::Index n = geom.X.rows();
  const Eigen::Index p = geom.X.cols();
  Eigen::HouseholderQR<Matrix> qr(geom.X);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return {q.rightCols(n - p)};
}

}  // namespace

const RawInterval& RawDecision::selected() const {
  switch (region) {
    case Region::A:
      return interval_tau;
    case Region::B:
      return interval_xi;
    case Region::C:
      break;
  }
  return interval_full;
}

RawFit fit_raw(const GeometryBundle& geom, const Vector& y) {
  if (y.size() != geom.X.rows()) throw DomainError("response length must equal the number of observations");
  const Eigen::ColPivHouseholderQR<Matrix> qr(geom.X);
  if (qr.rank() < geom.X.cols()) throw SingularDesign("design matrix is rank deficient");
  RawFit fit;
  fit.y = y;
  fit.beta_hat = qr.solve(y);
  fit.rss_full = rss(geom.X, y, fit.beta_hat);
  fit.beta_tau = geom.G_tau * fit.beta_hat;
  fit.rss_tau = rss(geom.X, y, fit.beta_tau);
  fit.beta_xi = geom.G_xi * fit.beta_hat;
  fit.rss_xi = rss(geom.X, y, fit.beta_xi);
  fit.sigma2_hat = fit.rss_full / geom.m;
  return fit;
}

RawFit simulate_and_fit(const Vector& beta, double sigma, const GeometryBundle& geom, rng::Philox4x32& gen,
                        bool zero_noise) {
  require_beta(beta, sigma, geom);
  Vector y = geom.X * beta;
  if (!zero_noise) {
    std::normal_distribution<double> normal(0.0, sigma);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += normal(gen);
  }
  return fit_raw(geom, y);
}

RawDecision raw_decision(const RawFit& fit, const Vector& beta, const GeometryBundle& geom, const TwoStageConfig& cfg) {
  const auto k = static_cast<double>(geom.k);
  const double m = geom.m;
  RawDecision out;
  out.f.f_tau = ((fit.rss_tau - fit.rss_full) / k) / (fit.rss_full / m);
  out.f.f_xi = ((fit.rss_xi - fit.rss_full) / (k - 1.0)) / (fit.rss_full / m);
  out.region = classify(out.f, cfg);

  out.interval_tau = raw_interval(geom.a.dot(fit.beta_tau), cfg.t_mk, fit.rss_tau / (m + k), geom.v_star);
  out.interval_xi = raw_interval(geom.a.dot(fit.beta_xi), cfg.t_mk1, fit.rss_xi / (m + k - 1.0), geom.w_star);
  out.interval_full = raw_interval(geom.a.dot(fit.beta_hat), cfg.t_m, fit.rss_full / m, geom.v11);
  out.covered = out.selected().contains(geom.a.dot(beta));
  return out;
}

CoverageEstimate estimate_cp_raw(const Vector& beta, double sigma, const GeometryBundle& geom,
                                 const TwoStageConfig& cfg, std::uint64_t runs, std::uint64_t seed,
                                 const McOptions& opts) {
  require_beta(beta, sigma, geom);
  if (runs < 2) throw DomainError("need at least two simulation runs");
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_size);
  const std::size_t chunks = static_cast<std::size_t>((runs + chunk - 1) / chunk);
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, opts.threads, [&](std::size_t c) {
    auto gen = rng::make_stream(seed, 0, rng::Purpose::RawOracle, c);
    const std::uint64_t count = std::min<std::uint64_t>(chunk, runs - static_cast<std::uint64_t>(c) * chunk);
    for (std::uint64_t r = 0; r < count; ++r) {
      const RawFit fit = simulate_and_fit(beta, sigma, geom, gen);
      hits[c] += raw_decision(fit, beta, geom, cfg).covered;
    }
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;

  CoverageEstimate out;
  out.runs = runs;
  out.estimate = static_cast<double>(total) / static_cast<double>(runs);
  out.se = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(runs));
  out.estimator = Estimator::Naive;
  out.seed = seed;
  out.point = SlopePoint(Vector(beta.tail(static_cast<Eigen::Index>(geom.k)) / sigma));
  return out;
}

CrossCheckReport cross_check(const SlopePoint& point, const GeometryBundle& geom, const TwoStageConfig& cfg,
                             std::uint64_t runs, std::uint64_t seed, double sigma, const McOptions& opts) {
  if (runs < 2) throw DomainError("need at least two simulation runs");
  if (point.size() != geom.k) throw DomainError("slope point must have k entries");
  const Vector gamma = full_gamma(point, geom.k, opts.intercepts);
  const Vector beta = sigma * gamma;
  require_beta(beta, sigma, geom);
  const ResidualBasis basis = residual_basis(geom);
  const Matrix XL = geom.X * geom.XtX_inv_chol.triangularView<Eigen::Lower>();
  const Eigen::Index dim = gamma.size();
  const std::uint64_t point_hash = point.hash();

  struct Partial {
    std::uint64_t agree = 0, naive = 0, raw = 0;
    double rss_err = 0.0, f_err = 0.0, ci_err = 0.0;
  };
  const std::size_t chunk = std::max<std::size_t>(1, opts.chunk_size);
  const std::size_t chunks = static_cast<std::size_t>((runs + chunk - 1) / chunk);
  std::vector<Partial> partial(chunks);

  parallel_for(chunks, opts.threads, [&](std::size_t c) {
    auto gen = rng::make_stream(seed, point_hash, rng::Purpose::Naive, c);
    std::normal_distribution<double> normal;
    const std::uint64_t count = std::min<std::uint64_t>(chunk, runs - static_cast<std::uint64_t>(c) * chunk);
    Vector z(dim);
    Vector w = Vector::Zero(basis.N.cols());
    Partial local;
    for (std::uint64_t r = 0; r < count; ++r) {
      for (Eigen::Index i = 0; i < dim; ++i) z(i) = normal(gen);
      double d = 0.0;
      if (geom.m <= kChiSquareSumLimit) {
        std::normal_distribution<double> residual_normal;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
          w(i) = residual_normal(gen);
          d += w(i) * w(i);
        }
      } else {
        d = sample_chi_square(geom.m, gen);
        w.setZero();
        w(0) = std::sqrt(d);
      }

      const ScaledSufficientStats stats = assemble_stats(point, geom, z, d, opts.intercepts);
      SelectionOutcome outcome;
      const bool naive_covered = coverage_indicator(stats, geom, cfg, gamma, outcome);

      const Vector y = geom.X * beta + sigma * (XL * z + basis.N * w);
      const RawFit fit = fit_raw(geom, y);
      const RawDecision raw = raw_decision(fit, beta, geom, cfg);

      local.naive += naive_covered;
      local.raw += raw.covered;
      local.agree += naive_covered == raw.covered;

      const Vector tau_hat = fit.beta_hat.tail(static_cast<Eigen::Index>(geom.k));
      const Vector u_tau = geom.U * tau_hat;
      local.rss_err = std::max({local.rss_err,
                                relative_error(fit.rss_tau, fit.rss_full + tau_hat.dot(geom.V22_inv * tau_hat)),
                                relative_error(fit.rss_xi, fit.rss_full + u_tau.dot(geom.W22_inv * u_tau))});

      const FStatistics scaled = f_statistics(stats, geom);
      local.f_err = std::max({local.f_err, relative_error(raw.f.f_tau, scaled.f_tau),
                              relative_error(raw.f.f_xi, scaled.f_xi)});

      const ScaledInterval it = interval_tau(stats, geom, cfg);
      const ScaledInterval ix = interval_xi(stats, geom, cfg);
      const ScaledInterval iff = interval_full(stats, geom, cfg);
      const double scale = std::max(1.0, std::fabs(geom.a.dot(gamma)));
      for (const auto& [raw_ci, scaled_ci] : {std::pair{raw.interval_tau, it}, std::pair{raw.interval_xi, ix},
                                              std::pair{raw.interval_full, iff}}) {
        local.ci_err = std::max({local.ci_err, std::fabs(raw_ci.lower / sigma - scaled_ci.lower()) / scale,
                                 std::fabs(raw_ci.upper / sigma - scaled_ci.upper()) / scale});
      }
    }
    partial[c] = local;
  });

  CrossCheckReport out;
  out.runs = runs;
  std::uint64_t naive = 0;
  std::uint64_t raw = 0;
  for (const auto& p : partial) {
    out.agreements += p.agree;
    naive += p.naive;
    raw += p.raw;
    out.max_rss_identity_error = std::max(out.max_rss_identity_error, p.rss_err);
    out.max_f_error = std::max(out.max_f_error, p.f_err);
    out.max_interval_error = std::max(out.max_interval_error, p.ci_err);
  }
  out.naive_estimate = static_cast<double>(naive) / static_cast<double>(runs);
  out.raw_estimate = static_cast<double>(raw) / static_cast<double>(runs);
  return out;
}

}  // namespace ancova_cp
