#pragma once

// Design files are JSON objects with explicit keys:
//
//   {
//     "k": 3,
//     "n": [8, 8, 8],
//     "x": [[...], [...], [...]],
//     "contrast": [1, -1, 0, c, -c, 0]            (2k coefficients), or
//     "contrast": {"i": 1, "j": 2, "x_star": "max_abs_centered"},
//     "alpha": 0.05, "sig_tau": 0.10, "sig_xi": 0.10,   (optional)
//     "runs": 10000, "seed": 1                          (optional)
//   }
//
// In the symbolic contrast form i and j are 1-based treatments. x_star is
// either "max_abs_centered" (x* − x̄ = max |x_ij − x̄|) or a covariate value x*.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ancova_cp/design.hpp"

namespace ancova_cp {

struct DesignFile {
  std::string name;
  AncovaLayout layout;
  ContrastSpec contrast;
  std::optional<double> alpha;
  std::optional<double> sig_tau;
  std::optional<double> sig_xi;
  std::optional<std::uint64_t> runs;
  std::optional<std::uint64_t> seed;
};

/// Throws ConfigError with the offending key on malformed input.
DesignFile parse_design(const std::string& json_text);
DesignFile load_design(const std::filesystem::path& path);

}  // namespace ancova_cp
