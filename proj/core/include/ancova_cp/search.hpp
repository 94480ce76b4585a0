#pragma once

// Restricted search for the minimum coverage probability.
//
// Inside a cube of slope points the CP is mapped on a lattice; sub-threshold
// lattice points are split into two clusters and a line with direction
// (1, .., 1) is fitted to each; the CP is then profiled along each line and
// the minimum refined. Outside the cube the first test rejects with
// probability close to one, so the CP there is approximated by placing the
// first slope at a large offset and scanning the slope differences over a
// square. The overall minimum is the smaller of the two.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ancova_cp/design.hpp"
#include "ancova_cp/montecarlo.hpp"

namespace ancova_cp {

struct AxisBounds {
  double lo = -0.25;
  double hi = 0.25;
};

struct GridSpec {
  std::vector<AxisBounds> bounds;  ///< one interval per axis
  std::size_t points_per_axis = 21;
  std::uint64_t runs = 10000;
  std::uint64_t seed = 1;

  /// [−half_width, half_width]^dims.
  static GridSpec cube(std::size_t dims, double half_width = 0.25, std::size_t points_per_axis = 21,
                       std::uint64_t runs = 10000, std::uint64_t seed = 1);

  /// Throws DomainError on empty/inverted/non-finite bounds or fewer than 2 points per axis.
  void validate() const;
  std::size_t dims() const { return bounds.size(); }
  std::size_t size() const;
  std::vector<double> axis(std::size_t i) const;
  /// Lattice point by flat index; the first axis varies slowest.
  Vector point(std::size_t flat_index) const;
};

using GridTable = std::vector<CoverageEstimate>;

/// One estimate per lattice point, each from the grid's seed and its own
/// point-keyed streams. Points are evaluated concurrently.
GridTable grid_eval(const GridSpec& spec, Estimator estimator, const GeometryBundle& geom, const TwoStageConfig& cfg,
                    unsigned threads = 0);

/// γ_slopes(c) = offsets + c·direction for c in [c_lo, c_hi].
struct LineLocus {
  Vector direction;
  Vector offsets;
  double c_lo = -0.25;
  double c_hi = 0.25;

  SlopePoint at(double c) const;
};

struct LineFit {
  LineLocus line;
  std::size_t cluster_size = 0;
  double rms_residual = 0.0;
  Vector principal_direction;  ///< leading eigenvector of the cluster scatter
  double angle_deg = 0.0;      ///< angle between principal_direction and (1, .., 1)

  std::string describe() const;
};

/// Splits points with estimate < threshold by the sign of γ_2 − γ_1
/// (positive: first line, negative: second) and fits unit-slope lines
/// γ_j = offset_j + γ_1. Throws InsufficientLowCPPoints when a cluster has
/// fewer than two points.
std::pair<LineFit, LineFit> fit_low_cp_lines(const GridTable& table, double threshold = 0.6,
                                             AxisBounds c_range = {});

struct ProfileRow {
  double c = 0.0;
  CoverageEstimate estimate;
};

struct LineProfile {
  LineLocus line;
  std::vector<ProfileRow> rows;
  std::size_t lattice_argmin = 0;
  double c_min = 0.0;           ///< vertex of the parabola through the lowest lattice value and its neighbours
  double cp_min_interpolated = 0.0;

  bool interior_minimum() const { return lattice_argmin > 0 && lattice_argmin + 1 < rows.size(); }
  /// Interior minimum with both end values above it by more than z combined SEs.
  bool u_shaped(double z = 3.0) const;
};

/// Throws DomainError when n_points < 3.
LineProfile line_profile(const LineLocus& line, std::size_t n_points, std::uint64_t runs, std::uint64_t seed,
                         Estimator estimator, const GeometryBundle& geom, const TwoStageConfig& cfg,
                         unsigned threads = 0);

/// Vertex of the parabola through (c[i−1..i+1], f[i−1..i+1]) on an equally
/// spaced lattice, around the lattice minimum. Returns (c_min, f_min).
std::pair<double, double> refine_minimum(const std::vector<double>& c, const std::vector<double>& f,
                                         std::size_t* argmin = nullptr);

/// CP with slopes (offset, offset + δ_1, .., offset + δ_{k−1}); with a large
/// offset the first test rejects almost surely and only the second test acts.
CoverageEstimate second_test_only_cp(const Vector& deltas, double offset, Estimator estimator,
                                     const GeometryBundle& geom, const TwoStageConfig& cfg, std::uint64_t runs,
                                     std::uint64_t seed, const McOptions& opts = {});

struct MinSearchConfig {
  Estimator estimator = Estimator::Conditioned;
  double cube_half_width = 0.25;
  std::size_t cube_points = 21;
  double square_half_width = 0.2;
  std::size_t square_points = 21;
  double large_offset = 1000.0;
  double threshold = 0.6;
  std::size_t profile_points = 41;
  std::uint64_t runs = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  /// Warn when a gate rejects with probability below this at the region boundary.
  double gate_warning_level = 0.99;
};

struct GateDiagnostic {
  Gate gate = Gate::Tau;
  SlopePoint point;
  CoverageEstimate acceptance;  ///< Pr(F ≤ ℓ)
};

struct MinSearchReport {
  CoverageEstimate min1;  ///< minimum over the cube, re-estimated at the refined point
  CoverageEstimate min2;  ///< minimum with only the second test acting
  double overall = 0.0;
  SlopePoint argmin;
  bool minimum_in_cube = true;

  GridTable cube_grid;
  GridTable square_grid;  ///< points carry the full slope vector
  std::optional<std::pair<LineFit, LineFit>> lines;
  std::vector<LineProfile> profiles;
  std::vector<GateDiagnostic> diagnostics;
  std::vector<std::string> warnings;
};

/// Seed used for the fresh re-estimate at a selected minimiser, so the
/// reported minimum is not biased by the selection.
std::uint64_t refinement_seed(std::uint64_t seed);

MinSearchReport min_cp_search(const GeometryBundle& geom, const TwoStageConfig& cfg, const MinSearchConfig& config);

}  // namespace ancova_cp
