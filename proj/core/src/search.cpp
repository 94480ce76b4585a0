#include "ancova_cp/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/parallel.hpp"
#include "ancova_cp/rng.hpp"

namespace ancova_cp {
namespace {

double angle_to_diagonal_deg(const Vector& direction) {
  const Vector diag = Vector::Ones(direction.size()).normalized();
  const double cosine = std::min(1.0, std::fabs(direction.normalized().dot(diag)));
  return std::acos(cosine) * 180.0 / std::numbers::pi;
}

LineFit fit_cluster(const std::vector<const CoverageEstimate*>& cluster, AxisBounds c_range, const char* label) {
  if (cluster.size() < 2) {
    throw InsufficientLowCPPoints(fmt::format("{} low-CP cluster has {} point(s); need at least 2", label,
                                              cluster.size()));
  }
  const Eigen::Index k = cluster.front()->point.values.size();
  const auto n = static_cast<double>(cluster.size());

  LineFit fit;
  fit.cluster_size = cluster.size();
  fit.line.direction = Vector::Ones(k);
  fit.line.offsets = Vector::Zero(k);
  fit.line.c_lo = c_range.lo;
  fit.line.c_hi = c_range.hi;

  // Unit slope on γ_1: least squares gives the mean difference.
  for (const auto* e : cluster) {
    const Vector& g = e->point.values;
    for (Eigen::Index j = 1; j < k; ++j) fit.line.offsets(j) += (g(j) - g(0)) / n;
  }
  double ss = 0.0;
  for (const auto* e : cluster) {
    const Vector& g = e->point.values;
    for (Eigen::Index j = 1; j < k; ++j) {
      const double r = g(j) - g(0) - fit.line.offsets(j);
      ss += r * r;
    }
  }
  fit.rms_residual = std::sqrt(ss / (n * static_cast<double>(std::max<Eigen::Index>(1, k - 1))));

  Vector mean = Vector::Zero(k);
  for (const auto* e : cluster) mean += e->point.values / n;
  Matrix scatter = Matrix::Zero(k, k);
  for (const auto* e : cluster) {
    const Vector d = e->point.values - mean;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter);
  Vector principal = eig.eigenvectors().col(k - 1);
  if (principal.sum() < 0.0) principal = -principal;
  fit.principal_direction = principal;
  fit.angle_deg = angle_to_diagonal_deg(principal);
  return fit;
}

}  // namespace

GridSpec GridSpec::cube(std::size_t dims, double half_width, std::size_t points_per_axis, std::uint64_t runs,
                        std::uint64_t seed) {
  GridSpec g;
  g.bounds.assign(dims, AxisBounds{-half_width, half_width});
  g.points_per_axis = points_per_axis;
  g.runs = runs;
  g.seed = seed;
  return g;
}

void GridSpec::validate() const {
  if (bounds.empty()) throw DomainError("grid needs at least one axis");
  for (const auto& b : bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
      throw DomainError("grid bounds must be finite with lo < hi");
    }
  }
  if (points_per_axis < 2) throw DomainError("grid needs at least 2 points per axis");
  if (runs < 2) throw DomainError("grid needs at least 2 runs per point");
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < bounds.size(); ++i) n *= points_per_axis;
  return n;
}

std::vector<double> GridSpec::axis(std::size_t i) const {
  const AxisBounds& b = bounds.at(i);
  std::vector<double> v(points_per_axis);
  const auto last = static_cast<double>(points_per_axis - 1);
  for (std::size_t j = 0; j < points_per_axis; ++j) v[j] = b.lo + (b.hi - b.lo) * static_cast<double>(j) / last;
  return v;
}

Vector GridSpec::point(std::size_t flat_index) const {
  const std::size_t k = bounds.size();
  Vector p(static_cast<Eigen::Index>(k));
  const auto last = static_cast<double>(points_per_axis - 1);
  for (std::size_t i = k; i-- > 0;) {
    const std::size_t j = flat_index % points_per_axis;
    flat_index /= points_per_axis;
    p(static_cast<Eigen::Index>(i)) = bounds[i].lo + (bounds[i].hi - bounds[i].lo) * static_cast<double>(j) / last;
  }
  return p;
}

GridTable grid_eval(const GridSpec& spec, Estimator estimator, const GeometryBundle& geom, const TwoStageConfig& cfg,
                    unsigned threads) {
  spec.validate();
  if (spec.dims() != geom.k) throw DomainError("grid dimension must equal the number of treatments");
  GridTable table(spec.size());
  McOptions opts;
  opts.threads = 1;
  parallel_for(table.size(), threads, [&](std::size_t i) {
    table[i] = estimate(estimator, SlopePoint(spec.point(i)), geom, cfg, spec.runs, spec.seed, opts);
  });
  return table;
}

SlopePoint LineLocus::at(double c) const { return SlopePoint(offsets + c * direction); }

std::string LineFit::describe() const {
  std::string s = "gamma_1 = c";
  for (Eigen::Index j = 1; j < line.offsets.size(); ++j) {
    s += fmt::format(", gamma_{} = {:+.4f} + c", j + 1, line.offsets(j));
  }
  return s;
}

std::pair<LineFit, LineFit> fit_low_cp_lines(const GridTable& table, double threshold, AxisBounds c_range) {
  std::vector<const CoverageEstimate*> first;
  std::vector<const CoverageEstimate*> second;
  for (const auto& e : table) {
    if (!(e.estimate < threshold) || e.point.size() < 2) continue;
    const double split = e.point.values(1) - e.point.values(0);
    if (split > 0.0) {
      first.push_back(&e);
    } else if (split < 0.0) {
      second.push_back(&e);
    }
  }
  return {fit_cluster(first, c_range, "first"), fit_cluster(second, c_range, "second")};
}

std::pair<double, double> refine_minimum(const std::vector<double>& c, const std::vector<double>& f,
                                         std::size_t* argmin) {
  if (c.size() != f.size() || c.size() < 3) throw DomainError("refine_minimum needs at least 3 lattice values");
  const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  if (argmin != nullptr) *argmin = best;
  const std::size_t i = std::clamp<std::size_t>(best, 1, c.size() - 2);
  const double f0 = f[i - 1];
  const double f1 = f[i];
  const double f2 = f[i + 1];
  const double curvature = f0 - 2.0 * f1 + f2;
  if (!(curvature > 0.0)) return {c[best], f[best]};
  const double h = c[i + 1] - c[i];
  const double shift = std::clamp(h * (f0 - f2) / (2.0 * curvature), -h, h);
  const double value = f1 - (f0 - f2) * (f0 - f2) / (8.0 * curvature);
  return {c[i] + shift, value};
}

bool LineProfile::u_shaped(double z) const {
  if (!interior_minimum()) return false;
  const auto& lo = rows[lattice_argmin].estimate;
  auto above = [&](const CoverageEstimate& e) {
    return e.estimate - lo.estimate > z * std::hypot(e.se, lo.se);
  };
  return above(rows.front().estimate) && above(rows.back().estimate);
}

LineProfile line_profile(const LineLocus& line, std::size_t n_points, std::uint64_t runs, std::uint64_t seed,
                         Estimator estimator, const GeometryBundle& geom, const TwoStageConfig& cfg, unsigned threads) {
  if (n_points < 3) throw DomainError("a line profile needs at least 3 points");
  if (!(line.c_lo < line.c_hi)) throw DomainError("line c-range must have c_lo < c_hi");

  LineProfile profile;
  profile.line = line;
  profile.rows.resize(n_points);
  const auto last = static_cast<double>(n_points - 1);
  McOptions opts;
  opts.threads = 1;
  parallel_for(n_points, threads, [&](std::size_t i) {
    const double c = line.c_lo + (line.c_hi - line.c_lo) * static_cast<double>(i) / last;
    profile.rows[i] = {c, estimate(estimator, line.at(c), geom, cfg, runs, seed, opts)};
  });

  std::vector<double> cs;
  std::vector<double> fs;
  for (const auto& r : profile.rows) {
    cs.push_back(r.c);
    fs.push_back(r.estimate.estimate);
  }
  std::tie(profile.c_min, profile.cp_min_interpolated) = refine_minimum(cs, fs, &profile.lattice_argmin);
  return profile;
}

CoverageEstimate second_test_only_cp(const Vector& deltas, double offset, Estimator estimator,
                                     const GeometryBundle& geom, const TwoStageConfig& cfg, std::uint64_t runs,
                                     std::uint64_t seed, const McOptions& opts) {
  if (deltas.size() + 1 != static_cast<Eigen::Index>(geom.k)) throw DomainError("need k - 1 slope differences");
  Vector slopes(deltas.size() + 1);
  slopes(0) = offset;
  slopes.tail(deltas.size()) = deltas.array() + offset;
  return estimate(estimator, SlopePoint(slopes), geom, cfg, runs, seed, opts);
}

std::uint64_t refinement_seed(std::uint64_t seed) { return rng::splitmix64(seed ^ 0x6D696E5F72656669ULL); }

MinSearchReport min_cp_search(const GeometryBundle& geom, const TwoStageConfig& cfg, const MinSearchConfig& config) {
  const std::size_t k = geom.k;
  const std::uint64_t fresh_seed = refinement_seed(config.seed);
  McOptions serial;
  serial.threads = 1;
  McOptions parallel;
  parallel.threads = config.threads;

  MinSearchReport report;

  // Cube.
  const GridSpec cube = GridSpec::cube(k, config.cube_half_width, config.cube_points, config.runs, config.seed);
  report.cube_grid = grid_eval(cube, config.estimator, geom, cfg, config.threads);

  const auto grid_best = std::min_element(report.cube_grid.begin(), report.cube_grid.end(),
                                          [](const auto& a, const auto& b) { return a.estimate < b.estimate; });
  SlopePoint candidate = grid_best->point;
  double screening = grid_best->estimate;

  try {
    report.lines = fit_low_cp_lines(report.cube_grid, config.threshold, cube.bounds.front());
  } catch (const InsufficientLowCPPoints& e) {
    report.warnings.push_back(std::string("line fit skipped: ") + e.what());
  }
  if (report.lines) {
    for (const LineFit* fit : {&report.lines->first, &report.lines->second}) {
      LineProfile p = line_profile(fit->line, config.profile_points, config.runs, config.seed, config.estimator, geom,
                                   cfg, config.threads);
      if (p.cp_min_interpolated < screening) {
        screening = p.cp_min_interpolated;
        candidate = fit->line.at(p.c_min);
      }
      report.profiles.push_back(std::move(p));
    }
  }
  report.min1 = estimate(config.estimator, candidate, geom, cfg, config.runs, fresh_seed, parallel);

  // Square of slope differences with the first slope far from zero.
  GridSpec square = GridSpec::cube(k - 1, config.square_half_width, config.square_points, config.runs, config.seed);
  square.validate();
  report.square_grid.resize(square.size());
  parallel_for(square.size(), config.threads, [&](std::size_t i) {
    report.square_grid[i] = second_test_only_cp(square.point(i), config.large_offset, config.estimator, geom, cfg,
                                                config.runs, config.seed, serial);
  });
  const auto square_best = std::min_element(report.square_grid.begin(), report.square_grid.end(),
                                            [](const auto& a, const auto& b) { return a.estimate < b.estimate; });
  report.min2 = estimate(config.estimator, square_best->point, geom, cfg, config.runs, fresh_seed, parallel);

  report.minimum_in_cube = report.min1.estimate <= report.min2.estimate;
  report.overall = std::min(report.min1.estimate, report.min2.estimate);
  report.argmin = report.minimum_in_cube ? report.min1.point : report.min2.point;

  // Gate diagnostics: first test at the cube face centres, second test at the
  // square edge midpoints.
  const double warn_acceptance = 1.0 - config.gate_warning_level;
  for (std::size_t i = 0; i < k; ++i) {
    for (double sign : {-1.0, 1.0}) {
      Vector p = Vector::Zero(static_cast<Eigen::Index>(k));
      p(static_cast<Eigen::Index>(i)) = sign * config.cube_half_width;
      GateDiagnostic d{Gate::Tau, SlopePoint(p), {}};
      d.acceptance = gate_probability(d.point, geom, cfg, Gate::Tau, config.runs, config.seed, parallel);
      if (d.acceptance.estimate > warn_acceptance) {
        report.warnings.push_back(fmt::format("first test rejects with probability {:.4f} < {} at cube boundary ({})",
                                              1.0 - d.acceptance.estimate, config.gate_warning_level,
                                              d.point.to_string()));
      }
      report.diagnostics.push_back(std::move(d));
    }
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    for (double sign : {-1.0, 1.0}) {
      Vector p = Vector::Constant(static_cast<Eigen::Index>(k), config.large_offset);
      p(static_cast<Eigen::Index>(i + 1)) += sign * config.square_half_width;
      GateDiagnostic d{Gate::Xi, SlopePoint(p), {}};
      d.acceptance = gate_probability(d.point, geom, cfg, Gate::Xi, config.runs, config.seed, parallel);
      if (d.acceptance.estimate > warn_acceptance) {
        report.warnings.push_back(
            fmt::format("second test rejects with probability {:.4f} < {} at square boundary ({})",
                        1.0 - d.acceptance.estimate, config.gate_warning_level, d.point.to_string()));
      }
      report.diagnostics.push_back(std::move(d));
    }
  }
  return report;
}

}  // namespace ancova_cp
