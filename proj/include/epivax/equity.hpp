#pragma once

// Gini coefficient of per-capita allocations, composite sub-regional
// priority weights, and plan-level equity reporting.

#include "epivax/scenario.hpp"

namespace epivax {

struct PriorityComponents {
  std::vector<double> d_svi;   // discretized SVI over the regional max bin
  std::vector<double> d_beta;  // initial infection rate over the regional max
  std::vector<double> d_pop;   // population over the regional max
};

struct KnapsackWeights {
  std::vector<double> composite;   // sqrt(d_svi^2 + d_beta^2 + d_pop^2)
  std::vector<double> rho;         // composite normalized within each region
  std::vector<double> delta;       // (1 - access_j) * rho
};

struct GiniReport {
  std::vector<double> per_capita;         // u per sub-region over the horizon
  std::vector<double> region_mean;        // average u per region
  std::vector<double> region_gini;        // G(u_j)
  double max_gini = 0.0;                  // eta
  std::vector<double> zeta;               // per period, min regional per-capita
};

// G = sum_{m,n} |u_m - u_n| / (2 * mean(u) * n^2); zero for an all-zero
// vector. Negative entries are rejected.
double gini_coefficient(const std::vector<double>& u);

// SVI discretized into four quartile bins, each component divided by its
// regional maximum. Regions with an all-zero column get zeros there.
// `groups` lists the sub-region ids of each region.
PriorityComponents county_priority_components(const std::vector<double>& svi,
                                              const std::vector<double>& beta0,
                                              const std::vector<double>& pop,
                                              const std::vector<std::vector<int>>& groups);

// Components from a scenario; every sub-region inherits its region's
// initial infection rate.
PriorityComponents county_priority_components(const Scenario& sc);

KnapsackWeights priority_weights(const Scenario& sc, const PriorityComponents& comp);

// Components and weights straight from a scenario.
KnapsackWeights scenario_priority_weights(const Scenario& sc);

GiniReport plan_equity_report(const Scenario& sc, const AllocationPlan& plan);

}  // namespace epivax
