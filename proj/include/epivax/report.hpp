#pragma once

// Report assembly beyond the core bundle: sensitivity tables, validation
// summaries and forecast tables in delimited text.

#include <filesystem>

#include "epivax/forecast.hpp"
#include "epivax/sensitivity.hpp"
#include "epivax/stats.hpp"

namespace epivax {

void write_sensitivity_table(const std::vector<SensitivityRow>& rows,
                             const std::filesystem::path& path);
std::vector<SensitivityRow> parse_sensitivity_table(const std::filesystem::path& path);

struct ValidationReport {
  TTestResult national;
  std::vector<TTestResult> per_region;
  double model_total = 0.0;
  double actual_total = 0.0;
};

void write_validation_report(const ValidationReport& rep, const std::filesystem::path& path);

void write_forecast_table(const Forecast& fc, const std::filesystem::path& path);

}  // namespace epivax
