#pragma once

// Brute-force reference optimizer for tiny instances: exhaustive enumeration
// over a grid of per-period regional allocation totals and binary center
// states, evaluating true objectives through simulation.

#include <cstdint>

#include "epivax/optimizer.hpp"
#include "epivax/scenario.hpp"

namespace epivax {

struct GridSpec {
  double step = 0.0;          // allocation step in doses; 0 derives supply/10
  std::uint64_t guard = 10'000'000;  // max decision sequences
};

struct OracleResult {
  AllocationPlan plan;
  Trajectory trajectory;
  ObjectiveValues objectives;
  std::uint64_t visited = 0;    // complete decision sequences examined
  std::uint64_t predicted = 0;  // product of grid sizes
  double step = 0.0;
  double slack = 0.0;  // step times the largest marginal objective coefficient
  bool found = false;
};

// Exact optimum over the grid. Regional totals are discretized; the
// sub-regional split inside each grid point is solved exactly; doses go to
// the susceptible stock first. Throws when the projected enumeration
// exceeds the guard.
OracleResult enumerate_optimum(const Scenario& sc, const GridSpec& grid,
                               ObjectiveKind objective = ObjectiveKind::Knapsack);

// Percent gap of a heuristic objective against the oracle optimum.
double gap_against_oracle(const Scenario& sc, double heuristic_scalarized, const GridSpec& grid,
                          ObjectiveKind objective = ObjectiveKind::Knapsack);

}  // namespace epivax
