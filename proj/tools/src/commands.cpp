#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ancova_cp/errors.hpp"
#include "ancova_cp/layout_io.hpp"
#include "ancova_cp/montecarlo.hpp"
#include "ancova_cp/oracle.hpp"
#include "ancova_cp/parallel.hpp"
#include "ancova_cp/search.hpp"
#include "report.hpp"

namespace ancova_cp::cli {
namespace {

struct CommonOptions {
  std::string config = ANCOVA_CP_DEFAULT_CONFIG;
  std::optional<double> alpha;
  std::optional<double> sig_tau;
  std::optional<double> sig_xi;
  bool thresholds_off = false;
  std::optional<std::uint64_t> runs;
  std::optional<std::uint64_t> seed;
  std::string estimator = "conditioned";
  std::string out;
  unsigned threads = 0;
};

struct Session {
  DesignFile design;
  GeometryBundle geom;
  TwoStageConfig cfg;
  std::uint64_t runs = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Design file (JSON)");
  cmd->add_option("--alpha", o.alpha, "Interval level is 1 - alpha");
  cmd->add_option("--sig-tau", o.sig_tau, "Significance level of the first F test");
  cmd->add_option("--sig-xi", o.sig_xi, "Significance level of the second F test");
  cmd->add_flag("--thresholds-off", o.thresholds_off, "Set both F thresholds to 0 (always the full model)");
  cmd->add_option("--runs", o.runs, "Simulation runs per point");
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--estimator", o.estimator, "naive, conditioned or both")
      ->check(CLI::IsMember({"naive", "conditioned", "both"}));
  cmd->add_option("--out", o.out, "Output file (directory for min)");
  cmd->add_option("--threads", o.threads, "Worker threads (0: ANCOVA_CP_THREADS or hardware)");
}

double probability(std::optional<double> flag, std::optional<double> file, double fallback, const char* name) {
  const double v = flag ? *flag : (file ? *file : fallback);
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(fmt::format("{} must lie in (0, 1), got {}", name, v));
  return v;
}

Session open_session(const CommonOptions& o) {
  Session s;
  s.design = load_design(o.config);
  const double alpha = probability(o.alpha, s.design.alpha, 0.05, "alpha");
  const double sig_tau = probability(o.sig_tau, s.design.sig_tau, 0.10, "sig-tau");
  const double sig_xi = probability(o.sig_xi, s.design.sig_xi, 0.10, "sig-xi");
  s.geom = build_geometry(s.design.layout, s.design.contrast);
  s.cfg = critical_values(s.design.layout, alpha, sig_tau, sig_xi);
  if (o.thresholds_off) s.cfg = s.cfg.with_thresholds(0.0, 0.0);
  s.runs = o.runs ? *o.runs : s.design.runs.value_or(10000);
  s.seed = o.seed ? *o.seed : s.design.seed.value_or(1);
  if (s.runs < 2) throw ConfigError("--runs must be at least 2");
  s.threads = o.threads == 0 ? default_thread_count() : o.threads;
  return s;
}

std::vector<Estimator> estimators(const std::string& name) {
  if (name == "both") return {Estimator::Naive, Estimator::Conditioned};
  return {parse_estimator(name)};
}

Estimator single_estimator(const std::string& name) {
  if (name == "both") throw ConfigError("this command takes a single estimator (naive or conditioned)");
  return parse_estimator(name);
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  try {
    const SlopePoint p = SlopePoint::parse(text);
    return {p.values.data(), p.values.data() + p.values.size()};
  } catch (const ConfigError&) {
    throw ConfigError(fmt::format("{}: expected comma-separated numbers, got '{}'", what, text));
  }
}

AxisBounds parse_range(const std::string& text, const char* what) {
  const auto v = parse_list(text, what);
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(fmt::format("{}: expected lo,hi with lo < hi", what));
  return {v[0], v[1]};
}

SlopePoint parse_point(const std::string& text, std::size_t k) {
  SlopePoint p;
  try {
    p = SlopePoint::parse(text);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("--point: {}", e.what()));
  }
  if (p.size() != k) throw ConfigError(fmt::format("--point needs {} values, got {}", k, p.size()));
  return p;
}

// Writes to --out when given, otherwise to `out`.
template <class Writer>
void emit(const std::string& path, std::ostream& out, Writer&& writer) {
  if (path.empty()) {
    writer(out);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  writer(f);
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path.string() + "'");
  f << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coverage probability of the confidence interval after two preliminary F tests in one-way ANCOVA"};
  app.require_subcommand(1);
  CommonOptions o;

  auto* cp = app.add_subcommand("cp", "Estimate the coverage probability at one slope point");
  add_common(cp, o);
  std::string point_text;
  cp->add_option("--point", point_text, "Slope point gamma_1,..,gamma_k")->required();

  auto* grid = app.add_subcommand("grid", "Coverage probability over a cube lattice");
  add_common(grid, o);
  std::string bounds_text = "-0.25,0.25";
  std::size_t density = 21;
  grid->add_option("--bounds", bounds_text, "Axis range lo,hi");
  grid->add_option("--density", density, "Points per axis");

  auto* lines = app.add_subcommand("lines", "Fit the two low-coverage lines on a cube lattice");
  add_common(lines, o);
  double threshold = 0.6;
  lines->add_option("--bounds", bounds_text, "Axis range lo,hi");
  lines->add_option("--density", density, "Points per axis");
  lines->add_option("--threshold", threshold, "Coverage below which a lattice point is low");

  auto* profile = app.add_subcommand("profile", "Coverage probability along offsets + c(1,..,1)");
  add_common(profile, o);
  std::string offsets_text;
  std::string c_range_text = "-0.25,0.25";
  std::size_t profile_points = 41;
  profile->add_option("--offsets", offsets_text, "Line offsets o_1,..,o_k")->required();
  profile->add_option("--c-range", c_range_text, "Range of c as lo,hi");
  profile->add_option("--points", profile_points, "Number of c values");

  auto* min = app.add_subcommand("min", "Restricted search for the minimum coverage probability");
  add_common(min, o);
  MinSearchConfig search;
  min->add_option("--half-width", search.cube_half_width, "Half width of the cube");
  min->add_option("--density", search.cube_points, "Cube points per axis");
  min->add_option("--square-half-width", search.square_half_width, "Half width of the slope-difference square");
  min->add_option("--square-density", search.square_points, "Square points per axis");
  min->add_option("--offset", search.large_offset, "First slope used when only the second test acts");
  min->add_option("--threshold", search.threshold, "Coverage below which a cube point is low");
  min->add_option("--points", search.profile_points, "Points per line profile");

  auto* oracle = app.add_subcommand("oracle", "Compare the naive estimator with the raw-data pipeline run for run");
  add_common(oracle, o);
  double sigma = 1.0;
  oracle->add_option("--point", point_text, "Slope point (default: zeros)");
  oracle->add_option("--sigma", sigma, "Noise standard deviation used for the raw data")
      ->check(CLI::PositiveNumber);

  auto* quantiles = app.add_subcommand("quantiles", "Print the F thresholds and t quantiles for a design");
  add_common(quantiles, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const Session s = open_session(o);
    const std::size_t k = s.geom.k;
    McOptions mc;
    mc.threads = s.threads;

    if (*cp) {
      const SlopePoint point = parse_point(point_text, k);
      std::vector<CoverageEstimate> rows;
      for (Estimator e : estimators(o.estimator)) rows.push_back(estimate(e, point, s.geom, s.cfg, s.runs, s.seed, mc));
      emit(o.out, out, [&](std::ostream& os) { write_csv(os, k, rows); });
      if (!o.out.empty()) write_csv(out, k, rows);
    } else if (*grid) {
      const AxisBounds b = parse_range(bounds_text, "--bounds");
      GridSpec spec;
      spec.bounds.assign(k, b);
      spec.points_per_axis = density;
      spec.runs = s.runs;
      spec.seed = s.seed;
      GridTable rows;
      for (Estimator e : estimators(o.estimator)) {
        GridTable part = grid_eval(spec, e, s.geom, s.cfg, s.threads);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      emit(o.out, out, [&](std::ostream& os) { write_csv(os, k, rows); });
      if (!o.out.empty()) out << fmt::format("wrote {} rows to {}\n", rows.size(), o.out);
    } else if (*lines) {
      const AxisBounds b = parse_range(bounds_text, "--bounds");
      GridSpec spec;
      spec.bounds.assign(k, b);
      spec.points_per_axis = density;
      spec.runs = s.runs;
      spec.seed = s.seed;
      const GridTable table = grid_eval(spec, single_estimator(o.estimator), s.geom, s.cfg, s.threads);
      if (!o.out.empty()) emit(o.out, out, [&](std::ostream& os) { write_csv(os, k, table); });
      const auto fits = fit_low_cp_lines(table, threshold, b);
      out << Json{{"threshold", threshold}, {"lines", Json::array({to_json(fits.first), to_json(fits.second)})}}.dump(2)
          << '\n';
    } else if (*profile) {
      const auto offsets = parse_list(offsets_text, "--offsets");
      if (offsets.size() != k) throw ConfigError(fmt::format("--offsets needs {} values", k));
      const AxisBounds c = parse_range(c_range_text, "--c-range");
      LineLocus line{Vector::Ones(static_cast<Eigen::Index>(k)),
                     Eigen::Map<const Vector>(offsets.data(), static_cast<Eigen::Index>(k)), c.lo, c.hi};
      const LineProfile p = line_profile(line, profile_points, s.runs, s.seed, single_estimator(o.estimator), s.geom,
                                         s.cfg, s.threads);
      emit(o.out, out, [&](std::ostream& os) { write_profile_csv(os, p); });
      if (!o.out.empty()) out << to_json(p).dump(2) << '\n';
    } else if (*min) {
      search.estimator = single_estimator(o.estimator);
      search.runs = s.runs;
      search.seed = s.seed;
      search.threads = s.threads;
      const MinSearchReport report = min_cp_search(s.geom, s.cfg, search);
      const std::string json = to_json(report).dump(2) + "\n";
      if (!o.out.empty()) {
        const std::filesystem::path dir(o.out);
        std::filesystem::create_directories(dir);
        write_file(dir / "report.json", json);
        std::ostringstream cube;
        write_csv(cube, k, report.cube_grid);
        write_file(dir / "cube_grid.csv", cube.str());
        std::ostringstream square;
        write_csv(square, k, report.square_grid);
        write_file(dir / "square_grid.csv", square.str());
        for (std::size_t i = 0; i < report.profiles.size(); ++i) {
          std::ostringstream csv;
          write_profile_csv(csv, report.profiles[i]);
          write_file(dir / fmt::format("profile_{}.csv", i + 1), csv.str());
        }
      }
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      out << json;
    } else if (*oracle) {
      const SlopePoint point =
          point_text.empty() ? SlopePoint(Vector::Zero(static_cast<Eigen::Index>(k))) : parse_point(point_text, k);
      const CrossCheckReport report = cross_check(point, s.geom, s.cfg, s.runs, s.seed, sigma, mc);
      Json j{{"point", point.to_string()}, {"seed", s.seed}, {"sigma", sigma}};
      j.update(to_json(report));
      const std::string text = j.dump(2) + "\n";
      emit(o.out, out, [&](std::ostream& os) { os << text; });
      if (!o.out.empty()) out << text;
    } else if (*quantiles) {
      Json j{{"design", s.design.name}, {"k", k}, {"m", s.geom.m}};
      j.update(to_json(s.cfg));
      out << j.dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ancova_cp::cli
