#include "epivax/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "epivax/optimizer.hpp"

namespace epivax {

const char* to_string(SensitivityParameter p) {
  switch (p) {
    case SensitivityParameter::Budget: return "budget";
    case SensitivityParameter::Supply: return "supply";
    case SensitivityParameter::InfectionRate: return "infection_rate";
    case SensitivityParameter::VaccineEffectiveness: return "vaccine_effectiveness";
    case SensitivityParameter::Capacity: return "capacity";
    case SensitivityParameter::Demand: return "demand";
  }
  return "?";
}

std::optional<SensitivityParameter> sensitivity_parameter_from(const std::string& name) {
  for (SensitivityParameter p :
       {SensitivityParameter::Budget, SensitivityParameter::Supply,
        SensitivityParameter::InfectionRate, SensitivityParameter::VaccineEffectiveness,
        SensitivityParameter::Capacity, SensitivityParameter::Demand})
    if (name == to_string(p)) return p;
  return std::nullopt;
}

Scenario apply_multiplier(const Scenario& sc, SensitivityParameter p, double multiplier,
                          EffectivenessReading reading) {
  if (!(multiplier > 0.0)) fail("bad-multiplier", "multipliers must be positive");
  Scenario out = sc;
  switch (p) {
    case SensitivityParameter::Budget:
      out.costs.budget *= multiplier;
      break;
    case SensitivityParameter::Supply:
      for (auto& row : out.supply.supplier_capacity)
        for (double& v : row) v *= multiplier;
      break;
    case SensitivityParameter::InfectionRate:
      for (auto& row : out.epidemic.beta)
        for (double& v : row) v *= multiplier;
      for (auto& row : out.epidemic.beta_vax)
        for (double& v : row) v *= multiplier;
      break;
    case SensitivityParameter::VaccineEffectiveness:
      for (std::size_t j = 0; j < out.epidemic.beta.size(); ++j)
        for (std::size_t t = 0; t < out.epidemic.beta[j].size(); ++t) {
          double beta = out.epidemic.beta[j][t];
          if (beta <= 0.0) continue;
          double ratio = out.epidemic.beta_vax[j][t] / beta;
          double scaled = reading == EffectivenessReading::Effectiveness
                              ? 1.0 - multiplier * (1.0 - ratio)
                              : multiplier * ratio;
          out.epidemic.beta_vax[j][t] = std::clamp(scaled, 0.0, 1.0) * beta;
        }
      break;
    case SensitivityParameter::Capacity:
      for (auto& row : out.supply.local_capacity)
        for (double& v : row) v *= multiplier;
      for (auto& row : out.supply.center_capacity)
        for (double& v : row) v *= multiplier;
      break;
    case SensitivityParameter::Demand:
      for (auto& row : out.supply.demand)
        for (double& v : row) v *= multiplier;
      break;
  }
  return out;
}

namespace {

SensitivityRow run_one(const Scenario& sc, SensitivityParameter p, double m,
                       EffectivenessReading reading) {
  SensitivityRow row;
  row.parameter = p;
  row.multiplier = m;
  try {
    Scenario varied = apply_multiplier(sc, p, m, reading);
    DecompositionResult res = run_knapsack_decomposition(varied);
    row.infections = res.objectives.infection_flux_total;
    for (const auto& r : res.plan.psi)
      for (double v : r) row.vaccinations += v;
    for (const auto& r : res.plan.xi)
      for (double v : r) row.vaccinations += v;
    for (const auto& xr : res.plan.x)
      for (std::size_t t = 0; t < xr.size(); ++t)
        if (xr[t] && (t == 0 || !xr[t - 1])) ++row.centers_opened;
  } catch (const Error& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::vector<SensitivityRow> run_sensitivity(const Scenario& sc, SensitivityParameter p,
                                            const std::vector<double>& multipliers,
                                            const SensitivityOptions& opt) {
  for (double m : multipliers)
    if (!(m > 0.0)) fail("bad-multiplier", "multipliers must be positive");

  SensitivityRow baseline = run_one(sc, p, 1.0, opt.reading);
  if (baseline.failed) fail("sensitivity-baseline", baseline.error);
  double ref_infections = opt.reference_infections.value_or(baseline.infections);
  double ref_vaccinations = baseline.vaccinations;

  std::vector<SensitivityRow> rows;
  for (double m : multipliers) {
    SensitivityRow row = (m == 1.0) ? baseline : run_one(sc, p, m, opt.reading);
    if (!row.failed) {
      row.infections_change_pct =
          ref_infections != 0.0 ? (row.infections - ref_infections) / ref_infections * 100.0 : 0.0;
      row.vaccinations_change_pct =
          ref_vaccinations != 0.0
              ? (row.vaccinations - ref_vaccinations) / ref_vaccinations * 100.0
              : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace epivax
