#include "report.hpp"

#include <fmt/format.h>

namespace ancova_cp::cli {
namespace {

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const char* gate_name(Gate g) { return g == Gate::Tau ? "first" : "second"; }

}  // namespace

std::string csv_header(std::size_t k, bool with_c) {
  std::string s = with_c ? "c," : "";
  for (std::size_t i = 1; i <= k; ++i) s += fmt::format("gamma_{},", i);
  return s + "estimate,se,runs,estimator,seed";
}

std::string csv_row(const CoverageEstimate& e, std::optional<double> c) {
  std::string s = c ? fmt::format("{},", *c) : "";
  for (Eigen::Index i = 0; i < e.point.values.size(); ++i) s += fmt::format("{},", e.point.values(i));
  return s + fmt::format("{},{},{},{},{}", e.estimate, e.se, e.runs, estimator_name(e.estimator), e.seed);
}

void write_csv(std::ostream& os, std::size_t k, const GridTable& rows) {
  os << csv_header(k) << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
}

void write_profile_csv(std::ostream& os, const LineProfile& profile) {
  os << csv_header(static_cast<std::size_t>(profile.line.offsets.size()), true) << '\n';
  for (const auto& r : profile.rows) os << csv_row(r.estimate, r.c) << '\n';
}

Json to_json(const CoverageEstimate& e) {
  return Json{{"point", vector_json(e.point.values)},
              {"estimate", e.estimate},
              {"se", e.se},
              {"runs", e.runs},
              {"estimator", estimator_name(e.estimator)},
              {"seed", e.seed}};
}

Json to_json(const LineFit& fit) {
  return Json{{"equation", fit.describe()},
              {"offsets", vector_json(fit.line.offsets)},
              {"direction", vector_json(fit.line.direction)},
              {"cluster_size", fit.cluster_size},
              {"rms_residual", fit.rms_residual},
              {"principal_direction", vector_json(fit.principal_direction)},
              {"angle_deg", fit.angle_deg}};
}

Json to_json(const LineProfile& profile) {
  const auto& lowest = profile.rows.at(profile.lattice_argmin);
  return Json{{"offsets", vector_json(profile.line.offsets)},
              {"c_range", {profile.line.c_lo, profile.line.c_hi}},
              {"points", profile.rows.size()},
              {"lattice_min", {{"c", lowest.c}, {"estimate", lowest.estimate.estimate}, {"se", lowest.estimate.se}}},
              {"c_min", profile.c_min},
              {"cp_min_interpolated", profile.cp_min_interpolated},
              {"interior_minimum", profile.interior_minimum()},
              {"u_shaped", profile.u_shaped()}};
}

Json to_json(const MinSearchReport& report) {
  Json out{{"min1", to_json(report.min1)},
           {"min2", to_json(report.min2)},
           {"overall", report.overall},
           {"argmin", vector_json(report.argmin.values)},
           {"minimum_in_cube", report.minimum_in_cube}};
  if (report.lines) {
    out["lines"] = Json::array({to_json(report.lines->first), to_json(report.lines->second)});
  }
  Json profiles = Json::array();
  for (const auto& p : report.profiles) profiles.push_back(to_json(p));
  out["profiles"] = profiles;
  Json gates = Json::array();
  for (const auto& d : report.diagnostics) {
    gates.push_back(Json{{"test", gate_name(d.gate)},
                         {"point", vector_json(d.point.values)},
                         {"acceptance", d.acceptance.estimate},
                         {"se", d.acceptance.se}});
  }
  out["gate_diagnostics"] = gates;
  out["warnings"] = report.warnings;
  return out;
}

Json to_json(const CrossCheckReport& report) {
  return Json{{"runs", report.runs},
              {"agreements", report.agreements},
              {"agreement_rate", report.agreement_rate()},
              {"naive_estimate", report.naive_estimate},
              {"raw_estimate", report.raw_estimate},
              {"max_rss_identity_error", report.max_rss_identity_error},
              {"max_f_error", report.max_f_error},
              {"max_interval_error", report.max_interval_error}};
}

Json to_json(const TwoStageConfig& cfg) {
  return Json{{"alpha", cfg.alpha},     {"sig_tau", cfg.sig_tau}, {"sig_xi", cfg.sig_xi},
              {"l_tau", cfg.l_tau},     {"l_xi", cfg.l_xi},       {"t_m", cfg.t_m},
              {"t_m_plus_k", cfg.t_mk}, {"t_m_plus_k_minus_1", cfg.t_mk1}};
}

}  // namespace ancova_cp::cli
