#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace ancova_cp {

/// Slope-to-noise ratios (b_1/σ, .., b_k/σ). For a fixed design the coverage
/// probability depends on the parameters only through this vector.
struct SlopePoint {
  Eigen::VectorXd values;

  SlopePoint() = default;
  explicit SlopePoint(Eigen::VectorXd v) : values(std::move(v)) {}

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  /// Stable 64-bit digest of the exact bit patterns; keys the RNG streams.
  std::uint64_t hash() const;
  /// Comma-separated, round-trippable.
  std::string to_string() const;
  /// Parses "v1,v2,..."; throws ConfigError on malformed input.
  static SlopePoint parse(const std::string& text);
};

}  // namespace ancova_cp
