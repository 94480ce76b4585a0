#include "ancova_cp/slope_point.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/rng.hpp"

namespace ancova_cp {

std::uint64_t SlopePoint::hash() const {
  std::uint64_t h = rng::splitmix64(static_cast<std::uint64_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double v = values(i) == 0.0 ? 0.0 : values(i);  // fold -0.0 into 0.0
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    h = rng::splitmix64(h ^ bits);
  }
  return h;
}

std::string SlopePoint::to_string() const {
  std::string out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt::format("{}", values(i));
  }
  return out;
}

SlopePoint SlopePoint::parse(const std::string& text) {
  std::vector<double> parsed;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("malformed point component '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw ConfigError("malformed point component '" + item + "'");
    if (!std::isfinite(v)) throw ConfigError("point components must be finite");
    parsed.push_back(v);
  }
  if (parsed.empty() || (!text.empty() && text.back() == ',')) throw ConfigError("malformed point '" + text + "'");
  return SlopePoint(Eigen::Map<const Eigen::VectorXd>(parsed.data(), static_cast<Eigen::Index>(parsed.size())));
}

}  // namespace ancova_cp
