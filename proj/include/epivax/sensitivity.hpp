#pragma once

// One-at-a-time sensitivity: rerun the knapsack decomposition with a single
// parameter scaled, reporting infections, vaccinations, center openings and
// percent changes against a reference.

#include <optional>
#include <string>

#include "epivax/scenario.hpp"

namespace epivax {

enum class SensitivityParameter {
  Budget,
  Supply,
  InfectionRate,
  VaccineEffectiveness,
  Capacity,
  Demand,
};

const char* to_string(SensitivityParameter p);
std::optional<SensitivityParameter> sensitivity_parameter_from(const std::string& name);

enum class EffectivenessReading {
  Effectiveness,  // multiplier scales 1 - beta_vax/beta
  Ratio,          // multiplier scales beta_vax/beta directly
};

struct SensitivityRow {
  SensitivityParameter parameter;
  double multiplier = 1.0;
  double infections = 0.0;     // cumulative incidence over the horizon
  double vaccinations = 0.0;   // doses administered
  int centers_opened = 0;
  double infections_change_pct = 0.0;
  double vaccinations_change_pct = 0.0;
  bool failed = false;
  std::string error;
};

struct SensitivityOptions {
  EffectivenessReading reading = EffectivenessReading::Effectiveness;
  // Reference for the infection percent change; when absent the multiplier-1
  // run is used.
  std::optional<double> reference_infections;
};

Scenario apply_multiplier(const Scenario& sc, SensitivityParameter p, double multiplier,
                          EffectivenessReading reading);

std::vector<SensitivityRow> run_sensitivity(const Scenario& sc, SensitivityParameter p,
                                            const std::vector<double>& multipliers,
                                            const SensitivityOptions& opt = {});

}  // namespace epivax
