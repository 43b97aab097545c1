#include "epivax/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "epivax/epidemic.hpp"

namespace epivax {

namespace {

struct Slot {
  int period = 0;
  int region = -1;  // allocation slot when >= 0
  int center = -1;  // center slot when >= 0
  int size = 0;     // number of grid values
  double step = 0.0;
};

// DFS over the slot choices, grouped by period. A period's slice is built
// (split, routed, priced) once all of its slots are chosen; infeasible
// prefixes skip the whole subtree while still counting its leaves.
struct Enumerator {
  const Scenario& sc;
  ObjectiveKind kind;
  std::vector<Slot> slots;
  KnapsackWeights weights;
  std::uint64_t visited = 0;

  AllocationPlan best_plan;
  double best_value = -std::numeric_limits<double>::infinity();
  bool found = false;

  AllocationPlan work;
  std::vector<int> choice;
  std::vector<double> period_cost;

  explicit Enumerator(const Scenario& s, ObjectiveKind k)
      : sc(s), kind(k), best_plan(AllocationPlan::zeros(s)), work(AllocationPlan::zeros(s)) {
    weights = scenario_priority_weights(sc);
    period_cost.assign(sc.horizon + 1, 0.0);
  }

  void count_subtree(std::size_t depth) {
    std::uint64_t leaves = 1;
    for (std::size_t d = depth; d < slots.size(); ++d) leaves *= std::uint64_t(slots[d].size);
    visited += leaves;
  }

  void zero_period(int t) {
    for (int j = 0; j < sc.num_regions(); ++j) {
      work.psi[j][t] = work.xi[j][t] = work.w1[j][t] = work.nu[j][t] = 0.0;
      work.trig_i[j][t] = work.trig_d[j][t] = 0;
    }
    for (int k = 0; k < sc.num_subregions(); ++k)
      work.phi[k][t] = work.omega[k][t] = work.g2[k][t] = work.w2[k][t] = 0.0;
    for (int l = 0; l < sc.num_pharmacies(); ++l) work.g3[l][t] = work.w3[l][t] = 0.0;
    for (int i = 0; i < sc.num_suppliers(); ++i)
      for (int j = 0; j < sc.num_regions(); ++j) work.g1[i][j][t] = 0.0;
    for (int o = 0; o < sc.num_centers(); ++o) work.x[o][t] = 0;
    work.zeta[t] = 0.0;
    period_cost[t] = 0.0;
  }

  bool build_period(int t) {
    for (int u = t; u <= sc.horizon; ++u) zero_period(u);

    const int J = sc.num_regions();
    const double keep = 1.0 - sc.supply.wastage;
    Trajectory proj = simulate(sc, work);

    MasterDecision md;
    md.period = t;
    md.psi.assign(J, 0.0);
    md.xi.assign(J, 0.0);
    md.open_center.assign(sc.num_centers(), 0);
    md.trig_i.assign(J, 0);
    md.trig_d.assign(J, 0);
    for (int j = 0; j < J; ++j) {
      TriggerPair tp = trigger_indicators(proj, sc, j, t);
      md.trig_i[j] = tp.infection;
      md.trig_d[j] = tp.demand;
    }

    for (std::size_t d = 0; d < slots.size(); ++d) {
      const Slot& slot = slots[d];
      if (slot.period != t || slot.center < 0) continue;
      int o = slot.center;
      int j = sc.region_of_center[o];
      int on = choice[d];
      if (!on) continue;
      if (!(md.trig_i[j] || md.trig_d[j])) return false;  // opening needs a trigger
      for (int oo : sc.centers_of[j])
        if (md.open_center[oo]) return false;  // at most one center per region
      md.open_center[o] = 1;
    }

    const int lag = dose_lag(sc.epidemic);
    const int l0 = sc.supply.lead_center;
    double supply_left = 0.0;
    for (int i = 0; i < sc.num_suppliers(); ++i) supply_left += sc.supply.supplier_capacity[i][t];

    for (std::size_t d = 0; d < slots.size(); ++d) {
      const Slot& slot = slots[d];
      if (slot.period != t || slot.region < 0) continue;
      int j = slot.region;
      double total = choice[d] * slot.step;

      double center_admin = 0.0;
      if (t - l0 >= 0)
        for (int o : sc.centers_of[j])
          center_admin += keep * sc.supply.center_capacity[o][t] * work.x[o][t - l0];
      if (total + 1e-9 < center_admin) return false;  // committed throughput unmet
      if (total > sc.supply.demand[j][t] + 1e-9) return false;
      double cum = total;
      for (int u = 0; u < t; ++u) cum += work.psi[j][u] + work.xi[j][u];
      if (cum > sc.epidemic.pop_region[j] + 1e-9) return false;
      if (t < sc.first_admin_period(j) && total > 0.0) return false;

      double chi = 0.0;
      for (int k : sc.subregions_of[j]) chi += sc.supply.local_capacity[k][t];
      if (total - center_admin > chi + 1e-9) return false;

      // Susceptible stock first, remainder to the recovered stock.
      int land = t + lag + 1;
      double s_avail = land <= sc.horizon ? proj.states[land].s[j]
                                          : std::numeric_limits<double>::infinity();
      const EpidemicState& cur = proj.states[t];
      double r_avail = (1.0 - sc.epidemic.mu) * cur.r[j] + sc.epidemic.gamma * cur.i[j];
      if (sc.epidemic.psi) r_avail += sc.epidemic.gamma1 * cur.v[j];
      md.psi[j] = std::min(total, std::max(s_avail, 0.0));
      md.xi[j] = total - md.psi[j];
      if (md.xi[j] > r_avail + 1e-9) return false;

      supply_left -= total <= 0.0 ? 0.0 : total / keep;
      if (supply_left < -1e-9) return false;
    }

    double zmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < J; ++j)
      zmin = std::min(zmin, (md.psi[j] + md.xi[j]) / sc.epidemic.pop_region[j]);
    md.zeta = J ? zmin : 0.0;

    SplitPolicy policy =
        kind == ObjectiveKind::Knapsack ? SplitPolicy::PriorityWeightedFast : SplitPolicy::PerCapita;
    try {
      SubproblemResult sub = solve_flow_subproblem(sc, md, weights, work, policy);
      period_cost[t] = sub.cost_increment;
    } catch (const Error&) {
      return false;
    }
    double cumulative = 0.0;
    for (int u = 0; u <= t; ++u) cumulative += period_cost[u];
    if (cumulative > sc.costs.budget * (1.0 + 1e-12)) return false;
    return true;
  }

  void evaluate_leaf() {
    ++visited;
    Trajectory traj;
    try {
      traj = simulate(sc, work);
    } catch (const Error&) {
      return;
    }
    ObjectiveValues obj = evaluate_objectives(sc, work, traj, kind);
    if (!found || obj.scalarized > best_value + 1e-12) {
      best_value = obj.scalarized;
      best_plan = work;
      found = true;
    }
  }

  void descend(std::size_t depth, int chosen_period) {
    if (depth == slots.size()) {
      if (!build_period(chosen_period)) {
        ++visited;
        return;
      }
      evaluate_leaf();
      return;
    }
    const Slot& slot = slots[depth];
    if (slot.period != chosen_period && chosen_period >= 1) {
      if (!build_period(chosen_period)) {
        count_subtree(depth);
        return;
      }
    }
    for (int v = 0; v < slot.size; ++v) {
      choice[depth] = v;
      descend(depth + 1, slot.period);
    }
  }
};

}  // namespace

OracleResult enumerate_optimum(const Scenario& sc, const GridSpec& grid, ObjectiveKind kind) {
  const int J = sc.num_regions();
  const int T = sc.horizon;
  if (J > 3) fail("oracle-size", "enumeration supports at most 3 regions");
  for (int j = 0; j < J; ++j)
    if (int(sc.subregions_of[j].size()) > 3)
      fail("oracle-size", "enumeration supports at most 3 sub-regions per region");
  if (T > 4) fail("oracle-size", "enumeration supports at most 4 periods");
  for (const auto& row : sc.supply.lead_1)
    for (int lv : row)
      if (lv != 0) fail("lead-unsupported", "enumeration requires zero supplier lead times");
  for (int lv : sc.supply.lead_2)
    if (lv != 0) fail("lead-unsupported", "enumeration requires zero regional lead times");
  for (int lv : sc.supply.lead_3)
    if (lv != 0) fail("lead-unsupported", "enumeration requires zero pharmacy lead times");

  double step = grid.step;
  if (step <= 0.0) {
    double mean_supply = 0.0;
    for (int t = 1; t <= T; ++t) {
      double s = 0.0;
      for (int i = 0; i < sc.num_suppliers(); ++i) s += sc.supply.supplier_capacity[i][t];
      mean_supply += s;
    }
    mean_supply /= double(std::max(T, 1));
    step = std::max(mean_supply / 10.0, 1.0);
  }

  Enumerator en(sc, kind);
  std::uint64_t predicted = 1;
  auto push_slot = [&](Slot slot) {
    en.slots.push_back(slot);
    predicted *= std::uint64_t(slot.size);
    if (predicted > grid.guard)
      fail("oracle-guard", "projected enumeration " + std::to_string(predicted) +
                               " exceeds the guard of " + std::to_string(grid.guard));
  };
  for (int t = 1; t <= T; ++t) {
    for (int o = 0; o < sc.num_centers(); ++o) {
      Slot slot;
      slot.period = t;
      slot.center = o;
      slot.size = 2;
      push_slot(slot);
    }
    for (int j = 0; j < J; ++j) {
      Slot slot;
      slot.period = t;
      slot.region = j;
      slot.step = step;
      double chi = 0.0;
      for (int k : sc.subregions_of[j]) chi += sc.supply.local_capacity[k][t];
      double kappa = 0.0;
      for (int o : sc.centers_of[j]) kappa += sc.supply.center_capacity[o][t];
      double cap = std::min({sc.supply.demand[j][t], sc.epidemic.pop_region[j],
                             chi + (1.0 - sc.supply.wastage) * kappa});
      slot.size = t < sc.first_admin_period(j) ? 1 : int(std::floor(std::max(cap, 0.0) / step)) + 1;
      push_slot(slot);
    }
  }

  en.choice.assign(en.slots.size(), 0);
  en.descend(0, 0);

  OracleResult out;
  out.visited = en.visited;
  out.predicted = predicted;
  out.step = step;
  out.found = en.found;
  if (!en.found) fail("oracle-empty", "no feasible plan in the enumerated grid");
  out.plan = std::move(en.best_plan);
  out.trajectory = simulate(sc, out.plan);
  out.objectives = evaluate_objectives(sc, out.plan, out.trajectory, kind);

  FeasibilityReport rep = check_full_feasibility(sc, out.plan, out.trajectory, 1e-6);
  if (!rep.feasible) fail("oracle-internal", "grid-best plan failed verification\n" + rep.to_string());

  // Grid-resolution slack: one step at the largest marginal coefficient.
  Trajectory base = simulate(sc, AllocationPlan::zeros(sc));
  KnapsackWeights kw = scenario_priority_weights(sc);
  double max_delta = *std::max_element(kw.delta.begin(), kw.delta.end());
  double min_subpop =
      *std::min_element(sc.epidemic.pop_subregion.begin(), sc.epidemic.pop_subregion.end());
  double min_pop = *std::min_element(sc.epidemic.pop_region.begin(), sc.epidemic.pop_region.end());
  double max_coeff = 0.0;
  for (int j = 0; j < J; ++j)
    for (int t = 1; t <= T; ++t) {
      double benefit = std::abs(sc.weights.lambda0) * sc.epidemic.beta[j][t] *
                       base.states[std::min(t + dose_lag(sc.epidemic) + 1, T)].i[j];
      double equity = kind == ObjectiveKind::Knapsack
                          ? sc.weights.lambda21 / min_pop +
                                sc.weights.lambda22 * (max_delta + sc.weights.lambda_reg / min_subpop)
                          : sc.weights.lambda11 / min_pop;
      max_coeff = std::max(max_coeff, benefit + equity);
    }
  out.slack = step * max_coeff;
  return out;
}

double gap_against_oracle(const Scenario& sc, double heuristic_scalarized, const GridSpec& grid,
                          ObjectiveKind kind) {
  OracleResult res = enumerate_optimum(sc, grid, kind);
  return optimality_gap(heuristic_scalarized, res.objectives.scalarized);
}

}  // namespace epivax
