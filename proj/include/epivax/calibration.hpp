#pragma once

// Recovers effective infection rates from observed cases and vaccinations by
// solving, per region and period, a small linear system that mirrors the
// simulator's susceptible/vaccinated recursions.

#include "epivax/scenario.hpp"

namespace epivax {

struct ObservedSeries {
  int num_regions = 0;
  int num_periods = 0;                 // observations at t = 0..num_periods-1
  Matrix reported_cases;               // [region][period]
  Matrix doses_administered;           // [region][period]
  std::vector<double> population;      // per region
  double underreporting_rate = 0.0;    // in [0,1)
  std::vector<std::pair<int, int>> gaps;  // (region, period) holes found on parse
};

struct CalibratedRates {
  Matrix beta;         // [region][period]
  Matrix beta_vax;     // reduction * beta
  Matrix r_effective;  // beta * gamma * (1 - S/N), as printed in the source method
  Matrix susceptible;  // reconstructed S series
  Matrix vaccinated;   // reconstructed V series
  std::vector<std::vector<bool>> missing;  // singular or negative solves
  std::vector<std::string> notes;
};

// cases / (1 - rate); rate must lie in [0,1).
double adjust_underreporting(double cases, double rate);

struct CalibrationOptions {
  double reduction = 0.2;          // beta_vax = reduction * beta
  bool interpolate_gaps = false;   // linearly fill flagged beta gaps
  double pivot_tolerance = 1e-12;  // singularity threshold for the 3x3 solve
  bool seed_unit_infection = true; // start from I=1, S=N-1, V=0
};

CalibratedRates calibrate_effective_rates(const ObservedSeries& obs, const EpidemicParams& params,
                                          const CalibrationOptions& opt = {});

// R_e = beta * gamma * (1 - S/N).
double effective_reproduction(double beta, double gamma, double s, double n);

}  // namespace epivax
