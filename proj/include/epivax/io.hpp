#pragma once

// File formats: scenario documents (JSON, schema in docs/scenario-format.md),
// tab-separated time series, and the run output bundle. All floats are
// written with 17 significant digits so bundles re-parse exactly.

#include <filesystem>
#include <string>

#include "epivax/calibration.hpp"
#include "epivax/optimizer.hpp"
#include "epivax/scenario.hpp"

namespace epivax {

Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text);
std::string scenario_to_text(const Scenario& sc);
void write_scenario(const Scenario& sc, const std::filesystem::path& path);

ObservedSeries parse_timeseries(const std::filesystem::path& path);
void write_timeseries(const ObservedSeries& obs, const std::filesystem::path& path);

std::string format_double(double v);  // 17 significant digits

// Output bundle: plan.tsv, trajectory.tsv, ledger.tsv, equity.tsv,
// diagnostics.txt, summary.txt under the given directory.
void write_bundle(const Scenario& sc, const DecompositionResult& res,
                  const std::filesystem::path& dir);

void write_rates(const CalibratedRates& rates, const std::filesystem::path& path);
Matrix parse_rates_beta(const std::filesystem::path& path);  // beta column per region

// Re-parse helpers used by round-trip tests.
Matrix parse_tsv_matrix(const std::filesystem::path& path, const std::string& value_column,
                        const std::string& row_column, const std::string& col_column);

}  // namespace epivax
