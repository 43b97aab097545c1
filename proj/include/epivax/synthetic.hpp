#pragma once

// Reproducible synthetic scenarios for desk-scale experiments; parameter
// bands follow the calibrated defaults (biweekly periods, dose prices in
// the 10-24 band, wastage zero, center capacity near 10k per period).

#include "epivax/scenario.hpp"

namespace epivax {

struct SyntheticSpec {
  int regions = 2;
  int subregions_per_region = 2;
  int pharmacies_per_subregion = 1;
  int suppliers = 1;
  int periods = 4;
  int centers_per_region = 1;

  double population_scale = 100000.0;  // mean region population
  double supply_factor = 0.6;   // supply as a share of per-period demand
  double budget_factor = 4.0;   // budget relative to full-supply spend
  double demand_share = 0.8;    // horizon demand as a share of population
  double growth_low = 0.9, growth_high = 1.5;  // epidemic growth band
  bool with_reinfection = false;
};

Scenario generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec);

// The preset exercised by the enumeration oracle: small enough to stay
// within the default guard.
SyntheticSpec tiny_preset();

}  // namespace epivax
