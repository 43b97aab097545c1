#include "epivax/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epivax/epidemic.hpp"
#include "epivax/lp.hpp"

namespace epivax {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Horizon: return "horizon";
    case Termination::BudgetBand: return "budget-band";
    case Termination::DoubleInfeasible: return "double-infeasible";
  }
  return "?";
}

double optimality_gap(double heuristic_objective, double incumbent_objective) {
  if (incumbent_objective == 0.0) fail("zero-incumbent", "optimality gap needs a nonzero incumbent");
  return std::abs(heuristic_objective - incumbent_objective) / std::abs(incumbent_objective) * 100.0;
}

double unit_cost_estimate(const Scenario& sc, int j, int t) {
  const int M = sc.num_suppliers();
  const int tp = std::max(t - 1, 0);  // previous-period capacity, clamped at the start
  double cap_sum = 0.0, weighted = 0.0;
  for (int i = 0; i < M; ++i) {
    double cap = sc.supply.supplier_capacity[i][tp];
    cap_sum += cap;
    weighted += sc.costs.dose_cost[i][t] * cap;
  }
  if (cap_sum <= 0.0)
    fail("zero-supply", "no supplier capacity at period " + std::to_string(tp));
  double dose_price = weighted / cap_sum;

  const auto& subs = sc.subregions_of[j];
  double g2_mean = 0.0, g3_mean = 0.0;
  for (int k : subs) {
    g2_mean += sc.costs.transport_2[k];
    double inner = 0.0;
    for (int l : sc.pharmacies_of[k]) inner += sc.costs.transport_3[l];
    if (!sc.pharmacies_of[k].empty()) inner /= double(sc.pharmacies_of[k].size());
    g3_mean += inner;
  }
  g2_mean /= double(subs.size());
  g3_mean /= double(subs.size());
  return dose_price + g2_mean + g3_mean + sc.costs.holding_1[j];
}

int budget_switch(double budget, double cumulative_cost, double big_m) {
  if (!(big_m > std::abs(budget - cumulative_cost)))
    fail("bad-big-m", "indicator constant must dominate |budget - cost|");
  return budget - cumulative_cost >= 0.0 ? 0 : 1;
}

namespace {

// Conservative per-administered-dose price bound for region j at period t:
// worst-case purchase and transport legs (inflated by wastage) plus the
// administration fee. through_pharmacy adds the deep legs.
double safe_dose_price(const Scenario& sc, int j, int t, bool through_pharmacy) {
  const double keep = 1.0 - sc.supply.wastage;
  double leg1 = 0.0;
  for (int i = 0; i < sc.num_suppliers(); ++i)
    leg1 = std::max(leg1, sc.costs.dose_cost[i][t] + sc.costs.transport_1[i][j]);
  double deep = 0.0;
  if (through_pharmacy) {
    for (int k : sc.subregions_of[j]) {
      double g3 = 0.0;
      for (int l : sc.pharmacies_of[k]) g3 = std::max(g3, sc.costs.transport_3[l]);
      deep = std::max(deep, sc.costs.transport_2[k] + g3);
    }
  }
  return (leg1 + deep) / keep + sc.costs.admin_cost[j][t];
}

// Cheapest exact per-dose supply price into region j (purchase + first leg).
double cheapest_supply_price(const Scenario& sc, int j, int t) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sc.num_suppliers(); ++i)
    best = std::min(best, sc.costs.dose_cost[i][t] + sc.costs.transport_1[i][j]);
  return best;
}

// Engine-side estimate that stays defined when a period has no supplier
// capacity (nothing can be bought then anyway).
double unit_cost_estimate_or_default(const Scenario& sc, int j, int t) {
  try {
    return unit_cost_estimate(sc, j, t);
  } catch (const Error&) {
    double mean_price = 0.0;
    for (int i = 0; i < sc.num_suppliers(); ++i) mean_price += sc.costs.dose_cost[i][t];
    mean_price /= double(std::max(sc.num_suppliers(), 1));
    const auto& subs = sc.subregions_of[j];
    double g2_mean = 0.0, g3_mean = 0.0;
    for (int k : subs) {
      g2_mean += sc.costs.transport_2[k];
      double inner = 0.0;
      for (int l : sc.pharmacies_of[k]) inner += sc.costs.transport_3[l];
      if (!sc.pharmacies_of[k].empty()) inner /= double(sc.pharmacies_of[k].size());
      g3_mean += inner;
    }
    g2_mean /= double(subs.size());
    g3_mean /= double(subs.size());
    return mean_price + g2_mean + g3_mean + sc.costs.holding_1[j];
  }
}

// Pre-wastage doses drained from region j's hub by centers opened
// lead_center periods before t.
double forced_center_draw(const Scenario& sc, const AllocationPlan& plan, int j, int t) {
  const int l0 = sc.supply.lead_center;
  if (t - l0 < 0) return 0.0;
  double draw = 0.0;
  for (int o : sc.centers_of[j])
    draw += sc.supply.center_capacity[o][t] * plan.x[o][t - l0];
  return draw;
}

struct SplitSolution {
  std::vector<double> x;  // per sub-region of the target region
  double nu = 0.0;
  double objective = 0.0;
};

// max sum_k delta_k x_k + reg * nu  s.t.  sum x = total, 0 <= x_k <= cap_k,
// x_k >= n_k * nu. The value is concave in nu, so the greedy inner solve is
// searched over nu and later certified against the simplex route.
SplitSolution split_with_floor(const std::vector<double>& delta, const std::vector<double>& caps,
                               const std::vector<double>& pops, double total, double reg) {
  const int K = int(delta.size());
  SplitSolution out;
  out.x.assign(K, 0.0);
  if (total <= 0.0) return out;

  double pop_sum = 0.0;
  double nu_max = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    pop_sum += pops[k];
    nu_max = std::min(nu_max, caps[k] / pops[k]);
  }
  nu_max = std::min(nu_max, total / pop_sum);

  if (reg <= 0.0) {  // no floor reward: plain greedy is optimal at nu = 0
    std::vector<double> lo(K, 0.0);
    out.x = lp::solve_greedy_knapsack(delta, lo, caps, total);
    for (int k = 0; k < K; ++k) out.objective += delta[k] * out.x[k];
    return out;
  }
  if (K == 1) {  // single sub-region: everything goes there, floor maximal
    out.x[0] = total;
    out.nu = nu_max;
    out.objective = delta[0] * total + reg * nu_max;
    return out;
  }

  auto greedy_value = [&](double nu, std::vector<double>* xv) {
    std::vector<double> lo(K), hi(caps);
    for (int k = 0; k < K; ++k) lo[k] = std::min(nu * pops[k], caps[k]);
    std::vector<double> x = lp::solve_greedy_knapsack(delta, lo, hi, total);
    double v = reg * nu;
    for (int k = 0; k < K; ++k) v += delta[k] * x[k];
    if (xv) *xv = std::move(x);
    return v;
  };

  double lo = 0.0, hi = nu_max;
  for (int it = 0; it < 90 && hi - lo > 1e-14 * std::max(1.0, nu_max); ++it) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (greedy_value(m1, nullptr) < greedy_value(m2, nullptr)) lo = m1;
    else hi = m2;
  }
  double nu_best = 0.5 * (lo + hi);
  double v0 = greedy_value(0.0, nullptr);
  double vbest = greedy_value(nu_best, nullptr);
  double vmax = greedy_value(nu_max, nullptr);
  if (v0 >= vbest && v0 >= vmax) nu_best = 0.0;
  else if (vmax >= vbest) nu_best = nu_max;
  out.nu = nu_best;
  out.objective = greedy_value(nu_best, &out.x);
  return out;
}

SplitSolution split_with_floor_lp(const std::vector<double>& delta, const std::vector<double>& caps,
                                  const std::vector<double>& pops, double total, double reg) {
  const int K = int(delta.size());
  lp::LinearProgram prog;
  prog.objective = delta;
  prog.objective.push_back(reg);  // nu
  prog.lower.assign(K + 1, 0.0);
  prog.upper = caps;
  prog.upper.push_back(lp::kInf);
  {
    lp::Row r;
    r.coeffs.assign(K + 1, 1.0);
    r.coeffs[K] = 0.0;
    r.sense = lp::Sense::Equal;
    r.rhs = total;
    prog.rows.push_back(std::move(r));
  }
  for (int k = 0; k < K; ++k) {
    lp::Row r;
    r.coeffs.assign(K + 1, 0.0);
    r.coeffs[k] = 1.0;
    r.coeffs[K] = -pops[k];
    r.sense = lp::Sense::GreaterEqual;
    r.rhs = 0.0;
    prog.rows.push_back(std::move(r));
  }
  lp::LpSolution s = lp::solve_lp(prog);
  if (s.status != lp::LpStatus::Optimal)
    fail("routing-infeasible", "sub-regional split LP not optimal");
  SplitSolution out;
  out.x.assign(s.x.begin(), s.x.begin() + K);
  out.nu = s.x[K];
  out.objective = s.objective;
  return out;
}

}  // namespace

MasterSolve solve_master_period(const MasterContext& ctx) {
  const Scenario& sc = *ctx.sc;
  const AllocationPlan& plan = *ctx.plan;
  const Trajectory& proj = *ctx.proj;
  const int J = sc.num_regions();
  const int T = sc.horizon;
  const int t = ctx.period;
  const int l0 = sc.supply.lead_center;
  const int lag = dose_lag(sc.epidemic);
  const double keep = 1.0 - sc.supply.wastage;
  const double budget = sc.costs.budget;

  MasterSolve out;
  MasterDecision& dec = out.decision;
  dec.period = t;
  dec.alpha = ctx.alpha;
  dec.psi.assign(J, 0.0);
  dec.xi.assign(J, 0.0);
  dec.open_center.assign(sc.num_centers(), 0);
  dec.trig_i.assign(J, 0);
  dec.trig_d.assign(J, 0);

  std::vector<double> forced(J, 0.0);
  for (int j = 0; j < J; ++j) forced[j] = keep * forced_center_draw(sc, plan, j, t);

  // Center states. A trigger forces an opening while the budget switch is
  // off; lookahead guards keep the committed throughput administrable,
  // routable and affordable, otherwise the opening is suppressed (the full
  // formulation relaxes forced openings once the budget nears exhaustion).
  double committed_added = 0.0;
  double committed_draw_added = 0.0;  // openings earlier in this loop share the supply
  for (int j = 0; j < J; ++j) {
    TriggerPair tp = trigger_indicators(proj, sc, j, t);
    dec.trig_i[j] = tp.infection;
    dec.trig_d[j] = tp.demand;
    bool want_open = (ctx.alpha == 0) && !ctx.tail && (tp.infection || tp.demand);
    if (!want_open || sc.centers_of[j].empty()) continue;
    if (t + l0 > T) continue;  // throughput would land beyond the horizon

    int best = -1;
    double best_cap = -1.0;
    for (int o : sc.centers_of[j]) {
      double cap = sc.supply.center_capacity[o][t + l0];
      if (cap > best_cap) { best_cap = cap; best = o; }
    }
    if (best < 0 || best_cap <= 0.0) continue;

    double admin_at = best_cap * keep;
    double future_forced = keep * forced_center_draw(sc, plan, j, t + l0);
    if (future_forced + admin_at > sc.supply.demand[j][t + l0]) continue;
    if (ctx.administered[j] + ctx.committed_admin[j] + forced[j] + admin_at >
        sc.epidemic.pop_region[j])
      continue;
    // The forced throughput must find arms at its landing period.
    {
      const EpidemicState& at_land = proj.states[t + l0];
      double r_then = (1.0 - sc.epidemic.mu) * at_land.r[j] + sc.epidemic.gamma * at_land.i[j];
      int s_index = std::min(t + l0 + lag + 1, T);
      double s_then = proj.states[s_index].s[j];
      if (future_forced + admin_at > 0.8 * (s_then + r_then)) continue;
    }
    double supply_at = 0.0;
    for (int i = 0; i < sc.num_suppliers(); ++i) supply_at += sc.supply.supplier_capacity[i][t + l0];
    if (best_cap + committed_draw_added + ctx.committed_draw_at(t + l0) > supply_at) continue;
    double open_charge = (t > 0 && plan.x[best][t - 1]) ? 0.0 : sc.costs.open_cost[best];
    double throughput_cost = best_cap * cheapest_supply_price(sc, j, t + l0) +
                             admin_at * sc.costs.admin_cost[j][t + l0];
    if (ctx.cumulative_cost + ctx.committed_cost + committed_added + open_charge + throughput_cost >
        budget)
      continue;

    dec.open_center[best] = 1;
    committed_added += throughput_cost + open_charge;
    committed_draw_added += best_cap;
  }
  // Opening charges are paid inside the slice; only the future throughput
  // stays committed.
  out.committed_cost_added = 0.0;
  for (int o = 0; o < sc.num_centers(); ++o) {
    if (!dec.open_center[o]) continue;
    int j = sc.region_of_center[o];
    double cap = sc.supply.center_capacity[o][t + l0];
    out.committed_cost_added +=
        cap * cheapest_supply_price(sc, j, t + l0) + cap * keep * sc.costs.admin_cost[j][t + l0];
  }

  // Allocation LP over psi_j, xi_j and the shared per-capita floor zeta.
  lp::LinearProgram prog;
  const int n = 2 * J + 1;
  prog.objective.assign(n, 0.0);
  prog.lower.assign(n, 0.0);
  prog.upper.assign(n, lp::kInf);
  auto psi_ix = [&](int j) { return j; };
  auto xi_ix = [&](int j) { return J + j; };
  const int zeta_ix = 2 * J;

  // Commitments made by the openings above also reserve people and must be
  // visible to this period's allocation rows.
  std::vector<double> committed_admin = ctx.committed_admin;
  for (int o = 0; o < sc.num_centers(); ++o)
    if (dec.open_center[o])
      committed_admin[sc.region_of_center[o]] += keep * sc.supply.center_capacity[o][t + l0];

  const EpidemicState& cur = proj.states[t];
  for (int j = 0; j < J; ++j) {
    // Exact availability bounds: a dose lands lag+1 periods ahead in the
    // susceptible recursion; the recovered stock bound holds one step out.
    // Committed future throughput keeps a slice of the susceptibles back.
    int land = t + lag + 1;
    double r_avail = (1.0 - sc.epidemic.mu) * cur.r[j] + sc.epidemic.gamma * cur.i[j];
    if (sc.epidemic.psi) r_avail += sc.epidemic.gamma1 * cur.v[j];
    r_avail = std::max(r_avail, 0.0);
    double s_avail = lp::kInf;
    if (land <= T) {
      double s_raw = std::max(proj.states[land].s[j], 0.0);
      s_avail = std::max(s_raw - committed_admin[j], 0.0);
      // Never reserve so much that this period's own forced throughput
      // cannot be met.
      s_avail = std::max(s_avail, std::min(s_raw, forced[j] - r_avail));
    }
    prog.upper[psi_ix(j)] = s_avail;
    prog.upper[xi_ix(j)] = r_avail;

    double i_proj = (land <= T) ? proj.states[land].i[j] : 0.0;
    prog.objective[psi_ix(j)] =
        -sc.weights.lambda0 * sc.epidemic.beta[j][t] * i_proj / ctx.flux_scale;
  }
  prog.objective[zeta_ix] = ctx.zeta_weight;

  auto region_row = [&](int j, double coeff_zeta, lp::Sense sense, double rhs) {
    lp::Row r;
    r.coeffs.assign(n, 0.0);
    r.coeffs[psi_ix(j)] = 1.0;
    r.coeffs[xi_ix(j)] = 1.0;
    r.coeffs[zeta_ix] = coeff_zeta;
    r.sense = sense;
    r.rhs = rhs;
    prog.rows.push_back(std::move(r));
  };

  for (int j = 0; j < J; ++j) {
    double chi = 0.0;
    for (int k : sc.subregions_of[j]) chi += sc.supply.local_capacity[k][t];
    double pop_left = sc.epidemic.pop_region[j] - ctx.administered[j] - committed_admin[j];
    region_row(j, 0.0, lp::Sense::LessEqual, sc.supply.demand[j][t]);            // demand
    region_row(j, 0.0, lp::Sense::LessEqual, std::max(pop_left, forced[j]));     // population
    region_row(j, 0.0, lp::Sense::LessEqual, chi + forced[j]);  // deliverable this period
    region_row(j, 0.0, lp::Sense::GreaterEqual, forced[j]);     // committed center throughput
    region_row(j, -sc.epidemic.pop_region[j], lp::Sense::GreaterEqual, 0.0);  // per-capita floor
    if (t < sc.first_admin_period(j)) region_row(j, 0.0, lp::Sense::LessEqual, 0.0);
  }

  // Supply cap with the budget switch, in the printed form, plus the exact
  // routable bound (administration inflated by wastage must fit supply).
  double supply_now = 0.0;
  for (int i = 0; i < sc.num_suppliers(); ++i) supply_now += sc.supply.supplier_capacity[i][t];
  double inventory = 0.0;
  for (int j = 0; j < J; ++j) inventory += t > 0 ? plan.w1[j][t - 1] : 0.0;
  double min_mean_cost = *std::min_element(ctx.mean_unit_cost.begin(), ctx.mean_unit_cost.end());
  double remaining = budget - ctx.cumulative_cost;
  double factor = 1.0;
  if (ctx.alpha == 1) factor = remaining > 0.0 ? min_mean_cost / remaining : 0.0;
  double forced_sum = std::accumulate(forced.begin(), forced.end(), 0.0);
  {
    lp::Row r;
    r.coeffs.assign(n, 0.0);
    for (int j = 0; j < J; ++j) r.coeffs[psi_ix(j)] = r.coeffs[xi_ix(j)] = 1.0;
    r.sense = lp::Sense::LessEqual;
    r.rhs = std::max(factor * (supply_now + inventory), forced_sum);
    prog.rows.push_back(r);
    r.rhs = std::max(keep * (supply_now + inventory), forced_sum);
    prog.rows.push_back(std::move(r));
  }

  // Exact affordability row for budget-switched and tail solves: worst-case
  // dose prices keep the slice within what is left of the budget.
  if (ctx.alpha == 1 || ctx.tail) {
    lp::Row r;
    r.coeffs.assign(n, 0.0);
    double fixed = 0.0;
    for (int j = 0; j < J; ++j) {
      double price = safe_dose_price(sc, j, t, true);
      r.coeffs[psi_ix(j)] = price;
      r.coeffs[xi_ix(j)] = price;
      // Forced center doses skip the deep legs; credit the difference.
      fixed += forced[j] * (safe_dose_price(sc, j, t, false) - price);
    }
    r.sense = lp::Sense::LessEqual;
    double opening_now = 0.0;
    for (int o = 0; o < sc.num_centers(); ++o)
      if (dec.open_center[o] && !(t > 0 && plan.x[o][t - 1])) opening_now += sc.costs.open_cost[o];
    r.rhs = remaining - ctx.committed_cost - opening_now - fixed;
    prog.rows.push_back(std::move(r));
  }

  lp::LpSolution sol = lp::solve_lp(prog);
  if (sol.status != lp::LpStatus::Optimal)
    fail("master-infeasible", std::string("period master LP ") + lp::to_string(sol.status));

  double zmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < J; ++j) {
    dec.psi[j] = std::max(sol.x[psi_ix(j)], 0.0);
    dec.xi[j] = std::max(sol.x[xi_ix(j)], 0.0);
    zmin = std::min(zmin, (dec.psi[j] + dec.xi[j]) / sc.epidemic.pop_region[j]);
  }
  dec.zeta = J ? zmin : 0.0;  // tight floor regardless of the LP's slack choice
  return out;
}

double route_fixed_split(const Scenario& sc, const MasterDecision& master,
                         const std::vector<double>& sub_admin, AllocationPlan& plan) {
  const int t = master.period;
  const int J = sc.num_regions();
  const int M = sc.num_suppliers();
  const double keep = 1.0 - sc.supply.wastage;

  // The routing owns the whole period slice of the flow variables.
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < J; ++j) plan.g1[i][j][t] = 0.0;
  for (int k = 0; k < sc.num_subregions(); ++k) plan.g2[k][t] = plan.w2[k][t] = 0.0;
  for (int l = 0; l < sc.num_pharmacies(); ++l) plan.g3[l][t] = plan.w3[l][t] = 0.0;

  plan.zeta[t] = master.zeta;
  for (int o = 0; o < sc.num_centers(); ++o) plan.x[o][t] = master.open_center[o];
  for (int j = 0; j < J; ++j) {
    plan.psi[j][t] = master.psi[j];
    plan.xi[j][t] = master.xi[j];
    plan.trig_i[j][t] = master.trig_i[j];
    plan.trig_d[j][t] = master.trig_d[j];
  }

  std::vector<double> supplier_left(M);
  for (int i = 0; i < M; ++i) supplier_left[i] = sc.supply.supplier_capacity[i][t];

  for (int j = 0; j < J; ++j) {
    double pharmacy_admin = 0.0;
    for (int k : sc.subregions_of[j]) pharmacy_admin += sub_admin[k];
    double center_draw = forced_center_draw(sc, plan, j, t);
    double need = pharmacy_admin / keep + center_draw;

    double inv = t > 0 ? plan.w1[j][t - 1] : 0.0;
    double from_inventory = std::min(inv, need);
    plan.w1[j][t] = inv - from_inventory;
    double to_buy = need - from_inventory;

    // Cheapest supplier first; ties by index.
    std::vector<int> order(M);
    for (int i = 0; i < M; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      double ca = sc.costs.dose_cost[a][t] + sc.costs.transport_1[a][j];
      double cb = sc.costs.dose_cost[b][t] + sc.costs.transport_1[b][j];
      if (ca != cb) return ca < cb;
      return a < b;
    });
    for (int i : order) {
      if (to_buy <= 1e-12) break;
      double take = std::min(supplier_left[i], to_buy);
      plan.g1[i][j][t] += take;
      supplier_left[i] -= take;
      to_buy -= take;
    }
    if (to_buy > 1e-6)
      fail("routing-infeasible", "supply short by " + std::to_string(to_buy) + " in region " +
                                     std::to_string(j) + " at period " + std::to_string(t));

    double total_admin = master.psi[j] + master.xi[j];
    double psi_share = total_admin > 0.0 ? master.psi[j] / total_admin : 1.0;
    for (int k : sc.subregions_of[j]) {
      double x = sub_admin[k];
      plan.phi[k][t] = x * psi_share;
      plan.omega[k][t] = x * (1.0 - psi_share);
      plan.g2[k][t] = x / keep;
      if (x > 0.0) {
        // A single cheapest pharmacy carries the final leg.
        int best = sc.pharmacies_of[k].empty() ? -1 : sc.pharmacies_of[k][0];
        for (int l : sc.pharmacies_of[k])
          if (sc.costs.transport_3[l] < sc.costs.transport_3[best]) best = l;
        if (best < 0)
          fail("routing-infeasible", "sub-region " + std::to_string(k) + " has no pharmacy");
        plan.g3[best][t] += x / keep;
      }
    }
  }

  // Price the slice with the same terms the ledger uses.
  double cost = 0.0;
  for (int j = 0; j < J; ++j) {
    cost += sc.costs.admin_cost[j][t] * (plan.psi[j][t] + plan.xi[j][t]);
    cost += sc.costs.holding_1[j] * plan.w1[j][t];
    for (int i = 0; i < M; ++i)
      cost += (sc.costs.dose_cost[i][t] + sc.costs.transport_1[i][j]) * plan.g1[i][j][t];
  }
  for (int k = 0; k < sc.num_subregions(); ++k) {
    cost += sc.costs.transport_2[k] * plan.g2[k][t];
    cost += sc.costs.holding_2[k] * plan.w2[k][t];
  }
  for (int l = 0; l < sc.num_pharmacies(); ++l) {
    cost += sc.costs.transport_3[l] * plan.g3[l][t];
    cost += sc.costs.holding_3[l] * plan.w3[l][t];
  }
  for (int o = 0; o < sc.num_centers(); ++o) {
    int prev = t > 0 ? plan.x[o][t - 1] : 0;
    if (plan.x[o][t] > prev) cost += sc.costs.open_cost[o];
  }
  return cost;
}

SubproblemResult solve_flow_subproblem(const Scenario& sc, const MasterDecision& master,
                                       const KnapsackWeights& weights, AllocationPlan& plan,
                                       SplitPolicy policy) {
  const int t = master.period;
  const int J = sc.num_regions();
  const int K = sc.num_subregions();
  const double keep = 1.0 - sc.supply.wastage;

  SubproblemResult out;
  out.phi.assign(K, 0.0);
  out.omega.assign(K, 0.0);
  out.nu.assign(J, 0.0);

  // Center states must be in place before throughput is derived.
  for (int o = 0; o < sc.num_centers(); ++o) plan.x[o][t] = master.open_center[o];

  std::vector<double> sub_admin(K, 0.0);
  for (int j = 0; j < J; ++j) {
    double center_admin = keep * forced_center_draw(sc, plan, j, t);
    double pharmacy_total = master.psi[j] + master.xi[j] - center_admin;
    if (pharmacy_total < -1e-6)
      fail("routing-infeasible", "center throughput exceeds the regional allocation");
    pharmacy_total = std::max(pharmacy_total, 0.0);

    const auto& subs = sc.subregions_of[j];
    std::vector<double> delta, caps, pops;
    double cap_sum = 0.0;
    for (int k : subs) {
      delta.push_back(weights.delta[k]);
      caps.push_back(sc.supply.local_capacity[k][t]);
      pops.push_back(sc.epidemic.pop_subregion[k]);
      cap_sum += sc.supply.local_capacity[k][t];
    }
    if (pharmacy_total > cap_sum * (1.0 + 1e-9))
      fail("routing-infeasible", "sub-regional capacity short by " +
                                     std::to_string(pharmacy_total - cap_sum) + " in region " +
                                     std::to_string(j));
    pharmacy_total = std::min(pharmacy_total, cap_sum);

    SplitSolution split;
    if (policy == SplitPolicy::PerCapita) {
      // Equal per-capita waterfill under capacity; no floor reward applies.
      split.x.assign(subs.size(), 0.0);
      double left = pharmacy_total;
      std::vector<char> open(subs.size(), 1);
      for (int round = 0; round <= int(subs.size()) && left > 1e-12; ++round) {
        double pop_open = 0.0;
        for (std::size_t a = 0; a < subs.size(); ++a)
          if (open[a]) pop_open += pops[a];
        if (pop_open <= 0.0) break;
        double rate = left / pop_open;
        bool clipped = false;
        for (std::size_t a = 0; a < subs.size(); ++a) {
          if (!open[a]) continue;
          if (split.x[a] + rate * pops[a] >= caps[a] - 1e-15) {
            left -= caps[a] - split.x[a];
            split.x[a] = caps[a];
            open[a] = 0;
            clipped = true;
          }
        }
        if (!clipped) {
          for (std::size_t a = 0; a < subs.size(); ++a)
            if (open[a]) { split.x[a] += rate * pops[a]; }
          left = 0.0;
        }
      }
    } else if (pharmacy_total > 0.0) {
      split = split_with_floor(delta, caps, pops, pharmacy_total, sc.weights.lambda_reg);
      if (policy == SplitPolicy::PriorityWeighted) {
        SplitSolution certified =
            split_with_floor_lp(delta, caps, pops, pharmacy_total, sc.weights.lambda_reg);
        if (relative_gap(split.objective, certified.objective) > 1e-7)
          fail("crosscheck", "floor-split greedy and simplex disagree at period " + std::to_string(t));
        split = std::move(certified);  // deterministic vertex solution
      }
    } else {
      split.x.assign(subs.size(), 0.0);
    }
    for (double& v : split.x) v = std::max(v, 0.0);  // scrub simplex round-off

    for (std::size_t a = 0; a < subs.size(); ++a) sub_admin[subs[a]] = split.x[a];
    out.nu[j] = split.nu;
    plan.nu[j][t] = split.nu;
  }

  out.cost_increment = route_fixed_split(sc, master, sub_admin, plan);
  for (int k = 0; k < K; ++k) {
    out.phi[k] = plan.phi[k][t];
    out.omega[k] = plan.omega[k][t];
  }
  return out;
}

namespace {

void clear_period(const Scenario& sc, AllocationPlan& plan, int t) {
  for (int j = 0; j < sc.num_regions(); ++j) {
    plan.psi[j][t] = plan.xi[j][t] = plan.w1[j][t] = plan.nu[j][t] = 0.0;
    plan.trig_i[j][t] = plan.trig_d[j][t] = 0;
  }
  for (int k = 0; k < sc.num_subregions(); ++k)
    plan.phi[k][t] = plan.omega[k][t] = plan.g2[k][t] = plan.w2[k][t] = 0.0;
  for (int l = 0; l < sc.num_pharmacies(); ++l) plan.g3[l][t] = plan.w3[l][t] = 0.0;
  for (int i = 0; i < sc.num_suppliers(); ++i)
    for (int j = 0; j < sc.num_regions(); ++j) plan.g1[i][j][t] = 0.0;
  for (int o = 0; o < sc.num_centers(); ++o) plan.x[o][t] = 0;
  plan.zeta[t] = 0.0;
}

struct Engine {
  const Scenario& sc;
  SplitPolicy policy;
  double zeta_weight;

  AllocationPlan plan;
  DecompositionDiagnostics diag;
  KnapsackWeights weights;
  std::vector<double> administered;
  std::vector<double> committed_admin;   // per region, future forced administrations
  std::vector<double> committed_draw;    // per period, future center supply draw
  std::vector<double> mean_unit_cost;
  double cumulative = 0.0;
  double committed = 0.0;
  double flux_scale = 1.0;

  Engine(const Scenario& s, SplitPolicy p, double zw)
      : sc(s), policy(p), zeta_weight(zw), plan(AllocationPlan::zeros(s)) {
    weights = scenario_priority_weights(sc);
    administered.assign(sc.num_regions(), 0.0);
    committed_admin.assign(sc.num_regions(), 0.0);
    committed_draw.assign(sc.horizon + 1, 0.0);
    const int T = sc.horizon;
    diag.unit_cost = zeros(sc.num_regions(), T + 1);
    mean_unit_cost.assign(sc.num_regions(), 0.0);
    for (int j = 0; j < sc.num_regions(); ++j) {
      for (int t = 1; t <= T; ++t) {
        diag.unit_cost[j][t] = unit_cost_estimate_or_default(sc, j, t);
        mean_unit_cost[j] += diag.unit_cost[j][t];
      }
      mean_unit_cost[j] /= double(std::max(T, 1));
    }
    diag.alpha_history.assign(T + 1, 0);
    diag.cost_increments.assign(T + 1, 0.0);
    diag.cumulative_cost.assign(T + 1, 0.0);
    if (sc.weights.normalized) {
      double burden = 0.0;
      for (int j = 0; j < sc.num_regions(); ++j)
        burden += sc.epidemic.init_i[j] + sc.epidemic.init_r[j];
      flux_scale = std::max(burden, 1.0);
    }
    for (const auto& row : sc.supply.lead_1)
      for (int lv : row)
        if (lv != 0) fail("lead-unsupported", "decomposition requires zero supplier lead times");
    for (int lv : sc.supply.lead_2)
      if (lv != 0) fail("lead-unsupported", "decomposition requires zero regional lead times");
    for (int lv : sc.supply.lead_3)
      if (lv != 0) fail("lead-unsupported", "decomposition requires zero pharmacy lead times");
  }

  MasterContext context(const Trajectory& proj, int t, int alpha, bool tail) const {
    MasterContext ctx;
    ctx.sc = &sc;
    ctx.plan = &plan;
    ctx.proj = &proj;
    ctx.period = t;
    ctx.alpha = alpha;
    ctx.tail = tail;
    ctx.cumulative_cost = cumulative;
    ctx.committed_cost = committed;
    ctx.administered = administered;
    ctx.committed_admin = committed_admin;
    ctx.committed_draw = committed_draw;
    ctx.mean_unit_cost = mean_unit_cost;
    ctx.zeta_weight = zeta_weight;
    ctx.flux_scale = flux_scale;
    return ctx;
  }

  // Commitments made at t - lead land at t; the slice now pays for them.
  void land_commitments(int t) {
    const int l0 = sc.supply.lead_center;
    if (t - l0 < 0) return;
    const double keep = 1.0 - sc.supply.wastage;
    for (int o = 0; o < sc.num_centers(); ++o) {
      if (!plan.x[o][t - l0]) continue;
      int j = sc.region_of_center[o];
      double cap = sc.supply.center_capacity[o][t];
      committed -= cap * cheapest_supply_price(sc, j, t) + cap * keep * sc.costs.admin_cost[j][t];
      committed_admin[j] -= cap * keep;
    }
    committed = std::max(committed, 0.0);
    for (double& v : committed_admin) v = std::max(v, 0.0);
  }

  void register_openings(const MasterDecision& dec, int t) {
    const int l0 = sc.supply.lead_center;
    if (t + l0 > sc.horizon) return;
    const double keep = 1.0 - sc.supply.wastage;
    for (int o = 0; o < sc.num_centers(); ++o) {
      if (!dec.open_center[o]) continue;
      int j = sc.region_of_center[o];
      double cap = sc.supply.center_capacity[o][t + l0];
      committed_admin[j] += cap * keep;
      committed_draw[t + l0] += cap;
    }
  }

  void accept(const MasterDecision& dec, double cost, double committed_added, int t) {
    cumulative += cost;
    committed += committed_added;
    register_openings(dec, t);
    diag.cost_increments[t] = cost;
    diag.cumulative_cost[t] = cumulative;
    for (int j = 0; j < sc.num_regions(); ++j) administered[j] += dec.psi[j] + dec.xi[j];
  }

  // Openings whose throughput would land at or after the aborted period can
  // no longer be routed; close them so the linking rows stay balanced.
  void close_dangling_openings(int aborted_period) {
    const int l0 = sc.supply.lead_center;
    for (int o = 0; o < sc.num_centers(); ++o)
      for (int u = 0; u <= sc.horizon; ++u)
        if (plan.x[o][u] && u + l0 >= aborted_period) plan.x[o][u] = 0;
  }

  void run() {
    const int T = sc.horizon;
    const double B = sc.costs.budget;
    bool tail = false;
    for (int t = 1; t <= T; ++t) {
      land_commitments(t);
      Trajectory proj = simulate(sc, plan);
      int alpha = tail ? 0 : budget_switch(B, cumulative, sc.big_m() + std::abs(B) + cumulative + 1.0);
      bool accepted = false;
      while (!accepted) {
        bool overran = false;
        const double budget_tol = 1e-9 * std::max(1.0, B);
        try {
          MasterSolve ms = solve_master_period(context(proj, t, alpha, tail));
          SubproblemResult sub = solve_flow_subproblem(sc, ms.decision, weights, plan, policy);
          double would_be = cumulative + sub.cost_increment;
          if (!tail && would_be > B + budget_tol) {
            overran = true;
          } else {
            diag.alpha_history[t] = alpha;
            accept(ms.decision, sub.cost_increment, ms.committed_cost_added, t);
            accepted = true;
          }
        } catch (const Error& e) {
          // A period whose committed throughput cannot be afforded or routed
          // is a budget conflict, handled by the same backtracking ladder.
          if (e.code() != "master-infeasible" && e.code() != "routing-infeasible") throw;
          overran = true;
        }
        if (!overran) break;
        clear_period(sc, plan, t);
        ++diag.backtracks;
        bool previous_switched = t > 1 && diag.alpha_history[t - 1] == 1;
        if (alpha == 1 || previous_switched) {
          diag.alpha_history[t] = 1;
          diag.termination = Termination::DoubleInfeasible;
          close_dangling_openings(t);
          finalize_triggers();
          return;
        }
        alpha = 1;
        for (int j = 0; j < sc.num_regions(); ++j)
          diag.unit_cost[j][t] = unit_cost_estimate_or_default(sc, j, t);
      }
      if (!tail && cumulative >= 0.95 * B && cumulative <= B) {
        tail = true;
        diag.termination = Termination::BudgetBand;
      }
    }
    if (diag.termination != Termination::BudgetBand) diag.termination = Termination::Horizon;
    finalize_triggers();
  }

  void finalize_triggers() {
    Trajectory final_traj = simulate(sc, plan);
    for (int j = 0; j < sc.num_regions(); ++j)
      for (int t = 0; t <= sc.horizon; ++t) {
        TriggerPair tp = trigger_indicators(final_traj, sc, j, t);
        plan.trig_i[j][t] = tp.infection;
        plan.trig_d[j][t] = tp.demand;
      }
  }
};

DecompositionResult finish_result(const Scenario& sc, Engine& eng) {
  DecompositionResult res;
  res.plan = std::move(eng.plan);
  res.trajectory = simulate(sc, res.plan);
  res.ledger = compute_cost(sc, res.plan);
  res.diagnostics = std::move(eng.diag);
  res.diagnostics.final_cost = res.ledger.total;
  res.equity = plan_equity_report(sc, res.plan);
  return res;
}

}  // namespace

DecompositionResult run_knapsack_decomposition(const Scenario& sc) {
  FeasibilityReport structural = validate_scenario(sc);
  if (!structural.feasible) fail("invalid-scenario", structural.to_string());

  Engine eng(sc, SplitPolicy::PriorityWeighted, sc.weights.lambda21);
  eng.run();
  DecompositionResult res = finish_result(sc, eng);
  res.objectives = evaluate_objectives(sc, res.plan, res.trajectory, ObjectiveKind::Knapsack);

  FeasibilityReport check = check_full_feasibility(sc, res.plan, res.trajectory, 1e-6);
  if (!check.feasible)
    fail("internal-infeasible", "decomposition produced an infeasible plan\n" + check.to_string());
  return res;
}

GiniDecompositionResult run_gini_decomposition(const Scenario& sc) {
  FeasibilityReport structural = validate_scenario(sc);
  if (!structural.feasible) fail("invalid-scenario", structural.to_string());

  Engine eng(sc, SplitPolicy::PerCapita, sc.weights.lambda11);
  eng.run();

  // Regional re-split over the horizon: minimize the summed pairwise
  // per-capita differences subject to per-period regional totals and local
  // capacity, then route the flows country-wide at the final split.
  const int T = sc.horizon;
  AllocationPlan& plan = eng.plan;
  for (int j = 0; j < sc.num_regions(); ++j) {
    const auto& subs = sc.subregions_of[j];
    const int K = int(subs.size());
    if (K <= 1) continue;

    std::vector<double> totals(T + 1, 0.0);
    for (int t = 0; t <= T; ++t)
      for (int k : subs) totals[t] += plan.phi[k][t] + plan.omega[k][t];
    std::vector<int> periods;
    for (int t = 1; t <= T; ++t)
      if (totals[t] > 0.0) periods.push_back(t);
    if (periods.empty()) continue;

    const int np = int(periods.size());
    const int nx = K * np;
    const int nu_base = nx;
    const int npairs = K * (K - 1) / 2;
    const int nv_base = nx + K;
    const int n = nx + K + npairs;

    lp::LinearProgram prog;
    prog.objective.assign(n, 0.0);
    prog.lower.assign(n, 0.0);
    prog.upper.assign(n, lp::kInf);
    for (int p = 0; p < npairs; ++p) prog.objective[nv_base + p] = -2.0;  // min sum of diffs

    for (int a = 0; a < K; ++a)
      for (int pi = 0; pi < np; ++pi)
        prog.upper[a * np + pi] = sc.supply.local_capacity[subs[a]][periods[pi]];

    for (int pi = 0; pi < np; ++pi) {
      lp::Row r;
      r.coeffs.assign(n, 0.0);
      for (int a = 0; a < K; ++a) r.coeffs[a * np + pi] = 1.0;
      r.sense = lp::Sense::Equal;
      r.rhs = totals[periods[pi]];
      prog.rows.push_back(std::move(r));
    }
    for (int a = 0; a < K; ++a) {
      lp::Row r;
      r.coeffs.assign(n, 0.0);
      for (int pi = 0; pi < np; ++pi)
        r.coeffs[a * np + pi] = 1.0 / sc.epidemic.pop_subregion[subs[a]];
      r.coeffs[nu_base + a] = -1.0;
      r.sense = lp::Sense::Equal;
      r.rhs = 0.0;
      prog.rows.push_back(std::move(r));
    }
    int pair = 0;
    for (int a = 0; a < K; ++a)
      for (int b = a + 1; b < K; ++b, ++pair) {
        lp::Row r1;
        r1.coeffs.assign(n, 0.0);
        r1.coeffs[nv_base + pair] = 1.0;
        r1.coeffs[nu_base + a] = -1.0;
        r1.coeffs[nu_base + b] = 1.0;
        r1.sense = lp::Sense::GreaterEqual;
        r1.rhs = 0.0;
        prog.rows.push_back(r1);
        r1.coeffs[nu_base + a] = 1.0;
        r1.coeffs[nu_base + b] = -1.0;
        prog.rows.push_back(std::move(r1));
      }

    lp::LpSolution sol = lp::solve_lp(prog);
    if (sol.status != lp::LpStatus::Optimal)
      fail("gini-split", "regional fairness LP " + std::string(lp::to_string(sol.status)));

    for (int a = 0; a < K; ++a)
      for (int pi = 0; pi < np; ++pi) {
        int t = periods[pi];
        double x = sol.x[a * np + pi];
        double total_admin = plan.psi[j][t] + plan.xi[j][t];
        double psi_share = total_admin > 0.0 ? plan.psi[j][t] / total_admin : 1.0;
        plan.phi[subs[a]][t] = x * psi_share;
        plan.omega[subs[a]][t] = x * (1.0 - psi_share);
      }
  }

  // Country-wide routing pass at the final split, rebuilding every flow and
  // the exact ledger.
  {
    Matrix phi = plan.phi, omega = plan.omega;
    for (int t = 1; t <= T; ++t) {
      MasterDecision md;
      md.period = t;
      md.psi.assign(sc.num_regions(), 0.0);
      md.xi.assign(sc.num_regions(), 0.0);
      md.open_center.assign(sc.num_centers(), 0);
      md.trig_i.assign(sc.num_regions(), 0);
      md.trig_d.assign(sc.num_regions(), 0);
      for (int j = 0; j < sc.num_regions(); ++j) {
        md.psi[j] = plan.psi[j][t];
        md.xi[j] = plan.xi[j][t];
        md.trig_i[j] = plan.trig_i[j][t];
        md.trig_d[j] = plan.trig_d[j][t];
      }
      for (int o = 0; o < sc.num_centers(); ++o) md.open_center[o] = plan.x[o][t];
      md.zeta = plan.zeta[t];
      std::vector<double> sub_admin(sc.num_subregions(), 0.0);
      for (int k = 0; k < sc.num_subregions(); ++k) sub_admin[k] = phi[k][t] + omega[k][t];
      route_fixed_split(sc, md, sub_admin, plan);
    }
    plan.phi = std::move(phi);
    plan.omega = std::move(omega);
  }

  GiniDecompositionResult res;
  static_cast<DecompositionResult&>(res) = finish_result(sc, eng);
  res.objectives = evaluate_objectives(sc, res.plan, res.trajectory, ObjectiveKind::Gini);

  double min_mean_cost = std::numeric_limits<double>::infinity();
  for (int j = 0; j < sc.num_regions(); ++j) {
    double s = 0.0;
    for (int t = 1; t <= sc.horizon; ++t) s += res.diagnostics.unit_cost[j][t];
    min_mean_cost = std::min(min_mean_cost, s / double(std::max(sc.horizon, 1)));
  }
  double spare = sc.costs.budget - res.ledger.total;
  res.optimality_residual = min_mean_cost > 0.0 ? spare / min_mean_cost : 0.0;
  res.residual_within_one_dose = res.optimality_residual <= 1.0;

  FeasibilityReport check = check_full_feasibility(sc, res.plan, res.trajectory, 1e-6);
  if (!check.feasible)
    fail("internal-infeasible", "fairness decomposition produced an infeasible plan\n" + check.to_string());
  return res;
}

}  // namespace epivax
