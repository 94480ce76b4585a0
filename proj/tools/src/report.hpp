#pragma once

// CSV rows and JSON reports. Numbers are written in shortest round-trip
// form so that equal inputs give byte-identical files.

#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ancova_cp/montecarlo.hpp"
#include "ancova_cp/oracle.hpp"
#include "ancova_cp/search.hpp"

namespace ancova_cp::cli {

using Json = nlohmann::ordered_json;

/// gamma_1..gamma_k,estimate,se,runs,estimator,seed, with a leading c column when with_c.
std::string csv_header(std::size_t k, bool with_c = false);
std::string csv_row(const CoverageEstimate& e, std::optional<double> c = std::nullopt);

void write_csv(std::ostream& os, std::size_t k, const GridTable& rows);
void write_profile_csv(std::ostream& os, const LineProfile& profile);

Json to_json(const CoverageEstimate& e);
Json to_json(const LineFit& fit);
Json to_json(const LineProfile& profile);
Json to_json(const MinSearchReport& report);
Json to_json(const CrossCheckReport& report);
Json to_json(const TwoStageConfig& cfg);

}  // namespace ancova_cp::cli
