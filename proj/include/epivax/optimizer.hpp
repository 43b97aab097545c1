#pragma once

// Rolling-horizon decomposition heuristics. The knapsack-based loop solves a
// per-period regional master, routes the result through the supply chain,
// accumulates cost and backtracks with a budget switch when the ledger
// overruns. The Gini-based variant reuses the masters, then re-splits
// sub-regional administration to minimize the largest regional Gini before
// routing flows country-wide.

#include <optional>
#include <string>

#include "epivax/equity.hpp"
#include "epivax/scenario.hpp"

namespace epivax {

struct MasterDecision {
  int period = 0;
  std::vector<double> psi, xi;           // per region
  std::vector<std::uint8_t> open_center; // per center, this period's state
  std::vector<std::uint8_t> trig_i, trig_d;  // per region
  double zeta = 0.0;
  int alpha = 0;  // budget switch used for this solve
};

enum class Termination { Horizon, BudgetBand, DoubleInfeasible };

const char* to_string(Termination t);

struct DecompositionDiagnostics {
  std::vector<double> cost_increments;   // accepted per-period cost
  std::vector<double> cumulative_cost;   // after each accepted period
  Matrix unit_cost;                      // [region][period] estimates
  std::vector<int> alpha_history;        // per decision period, final alpha
  int backtracks = 0;
  Termination termination = Termination::Horizon;
  double final_cost = 0.0;
  // Optimality gaps against an oracle value, filled by the caller when one
  // is available; reported on both bases.
  std::optional<double> gap_scalarized;
  std::optional<double> gap_infection;
};

struct DecompositionResult {
  AllocationPlan plan;
  Trajectory trajectory;
  CostLedger ledger;
  DecompositionDiagnostics diagnostics;
  ObjectiveValues objectives;
  GiniReport equity;
};

// Capacity-weighted mean dose price plus regional logistics estimate.
double unit_cost_estimate(const Scenario& sc, int j, int t);

// alpha = 0 while the cumulative cost stays within budget, 1 afterwards.
// M only scales the indicator encoding and must dominate |B - C|.
int budget_switch(double budget, double cumulative_cost, double big_m);

struct MasterContext {
  const Scenario* sc = nullptr;
  const AllocationPlan* plan = nullptr;  // doses committed so far
  const Trajectory* proj = nullptr;      // zero-further-dosing projection
  int period = 0;
  int alpha = 0;
  bool tail = false;  // budget band reached: no new openings, exact budget row
  double cumulative_cost = 0.0;
  double committed_cost = 0.0;  // future cost already locked in by openings
  std::vector<double> administered;     // per region, doses so far
  std::vector<double> committed_admin;  // per region, future forced administrations
  std::vector<double> committed_draw;   // per period, future center supply draw
  std::vector<double> mean_unit_cost;   // per region, horizon-mean estimate
  double zeta_weight = 1.0;             // reward on the per-capita floor
  double flux_scale = 1.0;              // divides the dose benefit when normalizing

  double committed_draw_at(int t) const {
    return (t >= 0 && t < int(committed_draw.size())) ? committed_draw[t] : 0.0;
  }
};

struct MasterSolve {
  MasterDecision decision;
  double committed_cost_added = 0.0;  // future throughput + opening commitments
};

// Fixes the trigger indicators from the state, decides center states per the
// bracket rule (forced open on a trigger while the budget switch is off,
// guarded by demand/population/supply/budget lookahead), and solves the
// per-period allocation LP with the dose-benefit surrogate objective.
MasterSolve solve_master_period(const MasterContext& ctx);

// PriorityWeightedFast skips the per-call simplex certification; used in
// enumeration hot paths where the greedy route has already been certified.
enum class SplitPolicy { PriorityWeighted, PriorityWeightedFast, PerCapita };

struct SubproblemResult {
  std::vector<double> phi, omega;  // per sub-region at this period
  std::vector<double> nu;          // per region
  double cost_increment = 0.0;
};

// Routes a master decision through supplier -> region -> sub-region ->
// pharmacy flows at this period, splitting doses across sub-regions by
// priority weight with an optimal per-capita floor (cross-checked greedy
// against simplex), and prices the slice. Writes the slice into the plan.
SubproblemResult solve_flow_subproblem(const Scenario& sc, const MasterDecision& master,
                                       const KnapsackWeights& weights, AllocationPlan& plan,
                                       SplitPolicy policy = SplitPolicy::PriorityWeighted);

// Routing with sub-regional administration fixed by the caller.
double route_fixed_split(const Scenario& sc, const MasterDecision& master,
                         const std::vector<double>& sub_admin, AllocationPlan& plan);

DecompositionResult run_knapsack_decomposition(const Scenario& sc);

struct GiniDecompositionResult : DecompositionResult {
  double optimality_residual = 0.0;  // (B - C) / min_j mean_t unit cost
  bool residual_within_one_dose = false;
};

GiniDecompositionResult run_gini_decomposition(const Scenario& sc);

// |heuristic - incumbent| / |incumbent| * 100.
double optimality_gap(double heuristic_objective, double incumbent_objective);

}  // namespace epivax
