#include "ancova_cp/layout_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ancova_cp/errors.hpp"

namespace ancova_cp {
namespace {

using nlohmann::json;

ContrastSpec parse_contrast(const json& node, const AncovaLayout& layout) {
  const std::size_t k = layout.treatments();
  if (node.is_array()) {
    if (node.size() != 2 * k) throw ConfigError("\"contrast\" must list 2k = " + std::to_string(2 * k) + " values");
    ContrastSpec c;
    c.a.resize(static_cast<Eigen::Index>(2 * k));
    for (std::size_t i = 0; i < 2 * k; ++i) c.a(static_cast<Eigen::Index>(i)) = node[i].get<double>();
    return c;
  }
  if (!node.is_object()) throw ConfigError("\"contrast\" must be a list or an {i, j, x_star} object");

  const auto i = node.at("i").get<long>();
  const auto j = node.at("j").get<long>();
  if (i < 1 || j < 1 || static_cast<std::size_t>(i) > k || static_cast<std::size_t>(j) > k || i == j) {
    throw ConfigError("contrast treatments i, j must be distinct values in 1..k");
  }
  double centered = layout.max_abs_centered();
  if (node.contains("x_star")) {
    const json& xs = node.at("x_star");
    if (xs.is_string()) {
      if (xs.get<std::string>() != "max_abs_centered") {
        throw ConfigError("unknown x_star keyword '" + xs.get<std::string>() + "'");
      }
    } else {
      centered = xs.get<double>() - layout.grand_mean();
    }
  }
  return ContrastSpec::treatment_difference(k, static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
                                            centered);
}

}  // namespace

DesignFile parse_design(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("design file is not valid JSON: ") + e.what());
  }

  try {
    DesignFile out;
    out.name = root.value("name", std::string("design"));
    auto x = root.at("x").get<std::vector<std::vector<double>>>();
    if (root.contains("k") && root.at("k").get<std::size_t>() != x.size()) {
      throw ConfigError("\"k\" does not match the number of covariate groups in \"x\"");
    }
    if (root.contains("n")) {
      const auto n = root.at("n").get<std::vector<std::size_t>>();
      if (n.size() != x.size()) throw ConfigError("\"n\" must have one entry per treatment");
      for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] != x[i].size()) {
          throw ConfigError("\"n\"[" + std::to_string(i) + "] does not match the length of \"x\"[" +
                            std::to_string(i) + "]");
        }
      }
    }
    out.layout = AncovaLayout(std::move(x));
    if (root.contains("contrast")) {
      out.contrast = parse_contrast(root.at("contrast"), out.layout);
    } else {
      out.contrast = ContrastSpec::treatment_difference(out.layout.treatments(), 0, 1, out.layout.max_abs_centered());
    }
    if (root.contains("alpha")) out.alpha = root.at("alpha").get<double>();
    if (root.contains("sig_tau")) out.sig_tau = root.at("sig_tau").get<double>();
    if (root.contains("sig_xi")) out.sig_xi = root.at("sig_xi").get<double>();
    if (root.contains("runs")) out.runs = root.at("runs").get<std::uint64_t>();
    if (root.contains("seed")) out.seed = root.at("seed").get<std::uint64_t>();
    return out;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed design file: ") + e.what());
  }
}

DesignFile load_design(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open design file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_design(buf.str());
}

}  // namespace ancova_cp
