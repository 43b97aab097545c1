#include "epivax/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epivax/epidemic.hpp"
#include "epivax/equity.hpp"

namespace epivax {

double Scenario::max_region_population() const {
  double m = 0.0;
  for (double n : epidemic.pop_region) m = std::max(m, n);
  return m;
}

int Scenario::pipeline_lead(int k) const {
  int j = region_of_sub[k];
  int l1 = 0;
  if (!supply.lead_1.empty()) {
    l1 = supply.lead_1[0][j];
    for (const auto& row : supply.lead_1) l1 = std::min(l1, row[j]);
  }
  int l3 = 0;
  if (!pharmacies_of[k].empty()) {
    l3 = supply.lead_3[pharmacies_of[k][0]];
    for (int l : pharmacies_of[k]) l3 = std::min(l3, supply.lead_3[l]);
  }
  return l1 + supply.lead_2[k] + l3;
}

int Scenario::first_admin_period(int j) const {
  int shortest = supply.lead_center;
  for (int k : subregions_of[j]) shortest = std::min(shortest, pipeline_lead(k));
  // Administration additionally never happens at the initial period.
  return std::max(shortest, 1);
}

void Scenario::finalize() {
  const int J = num_regions();
  int K = 0;
  for (const auto& subs : subregions_of) K += int(subs.size());
  region_of_sub.assign(K, -1);
  for (int j = 0; j < J; ++j)
    for (int k : subregions_of[j]) {
      if (k < 0 || k >= K) fail("scenario-structure", "sub-region id out of range: " + std::to_string(k));
      if (region_of_sub[k] != -1) fail("scenario-structure", "sub-region in two regions: " + std::to_string(k));
      region_of_sub[k] = j;
    }
  for (int k = 0; k < K; ++k)
    if (region_of_sub[k] == -1) fail("scenario-structure", "orphan sub-region: " + std::to_string(k));

  int L = 0;
  for (const auto& ph : pharmacies_of) L += int(ph.size());
  sub_of_pharmacy.assign(L, -1);
  for (int k = 0; k < int(pharmacies_of.size()); ++k)
    for (int l : pharmacies_of[k]) {
      if (l < 0 || l >= L) fail("scenario-structure", "pharmacy id out of range: " + std::to_string(l));
      if (sub_of_pharmacy[l] != -1) fail("scenario-structure", "pharmacy in two sub-regions: " + std::to_string(l));
      sub_of_pharmacy[l] = k;
    }
  for (int l = 0; l < L; ++l)
    if (sub_of_pharmacy[l] == -1) fail("scenario-structure", "orphan pharmacy: " + std::to_string(l));

  int O = 0;
  for (const auto& cs : centers_of) O += int(cs.size());
  region_of_center.assign(O, -1);
  for (int j = 0; j < J; ++j)
    for (int o : centers_of[j]) {
      if (o < 0 || o >= O) fail("scenario-structure", "center id out of range: " + std::to_string(o));
      if (region_of_center[o] != -1) fail("scenario-structure", "center in two regions: " + std::to_string(o));
      region_of_center[o] = j;
    }
}

AllocationPlan AllocationPlan::zeros(const Scenario& sc) {
  const int J = sc.num_regions(), K = sc.num_subregions(), L = sc.num_pharmacies();
  const int O = sc.num_centers(), M = sc.num_suppliers(), T1 = sc.horizon + 1;
  AllocationPlan p;
  p.psi = epivax::zeros(J, T1);
  p.xi = epivax::zeros(J, T1);
  p.phi = epivax::zeros(K, T1);
  p.omega = epivax::zeros(K, T1);
  p.g1.assign(M, epivax::zeros(J, T1));
  p.g2 = epivax::zeros(K, T1);
  p.g3 = epivax::zeros(L, T1);
  p.w1 = epivax::zeros(J, T1);
  p.w2 = epivax::zeros(K, T1);
  p.w3 = epivax::zeros(L, T1);
  p.x.assign(O, std::vector<std::uint8_t>(T1, 0));
  p.trig_i.assign(J, std::vector<std::uint8_t>(T1, 0));
  p.trig_d.assign(J, std::vector<std::uint8_t>(T1, 0));
  p.zeta.assign(T1, 0.0);
  p.nu = epivax::zeros(J, T1);
  return p;
}

const FeasibilityFamily* FeasibilityReport::family(const std::string& name) const {
  for (const auto& f : families)
    if (f.name == name) return &f;
  return nullptr;
}

std::string FeasibilityReport::to_string() const {
  std::ostringstream os;
  os << (feasible ? "feasible" : "infeasible") << " (tol " << tolerance << ")\n";
  for (const auto& f : families) {
    os << "  " << (f.pass ? "ok  " : "FAIL") << " " << f.name;
    if (!f.pass) {
      os << " worst " << f.worst_violation << " at";
      if (f.region >= 0) os << " j=" << f.region;
      if (f.subunit >= 0) os << " k=" << f.subunit;
      if (f.period >= 0) os << " t=" << f.period;
    }
    os << "\n";
  }
  return os.str();
}

namespace {

struct FamilyBuilder {
  FeasibilityFamily fam;
  explicit FamilyBuilder(std::string name) { fam.name = std::move(name); }
  void hit(double violation, int j = -1, int k = -1, int t = -1) {
    if (violation > fam.worst_violation) {
      fam.worst_violation = violation;
      fam.region = j;
      fam.subunit = k;
      fam.period = t;
    }
  }
  void commit(FeasibilityReport& rep) {
    fam.pass = fam.worst_violation <= rep.tolerance;
    rep.feasible = rep.feasible && fam.pass;
    rep.families.push_back(fam);
  }
};

double rel(double violation, double scale) { return violation / std::max(1.0, std::abs(scale)); }

}  // namespace

FeasibilityReport validate_scenario(const Scenario& sc) {
  FeasibilityReport rep;
  rep.tolerance = 1e-9;
  const int J = sc.num_regions(), K = sc.num_subregions(), T = sc.horizon;

  FamilyBuilder structure("structure");
  if (T < 1) structure.hit(1.0);
  if (sc.num_suppliers() < 1 || J < 1 || K < 1) structure.hit(1.0);
  for (int j = 0; j < J; ++j)
    if (sc.subregions_of[j].empty()) structure.hit(1.0, j);
  structure.commit(rep);

  FamilyBuilder signs("parameter signs");
  const EpidemicParams& ep = sc.epidemic;
  if (!(ep.mu > 0.0) || !(ep.gamma > 0.0) || !(ep.gamma1 > 0.0)) signs.hit(1.0);
  if (ep.psi != 0 && ep.psi != 1) signs.hit(1.0);
  for (int j = 0; j < J; ++j)
    for (int t = 0; t <= T; ++t)
      if (ep.beta[j][t] < 0.0) signs.hit(rel(-ep.beta[j][t], 1.0), j, -1, t);
  for (const auto& row : sc.supply.supplier_capacity)
    for (double v : row)
      if (v < 0.0) signs.hit(-v);
  for (const auto& row : sc.supply.demand)
    for (double v : row)
      if (v < 0.0) signs.hit(-v);
  if (sc.supply.wastage < 0.0 || sc.supply.wastage >= 1.0) signs.hit(1.0);
  if (!(sc.costs.budget > 0.0)) signs.hit(1.0);
  signs.commit(rep);

  FamilyBuilder beta_order("beta ordering");
  for (int j = 0; j < J; ++j)
    for (int t = 0; t <= T; ++t)
      if (ep.beta_vax[j][t] > ep.beta[j][t])
        beta_order.hit(ep.beta_vax[j][t] - ep.beta[j][t], j, -1, t);
  beta_order.commit(rep);

  FamilyBuilder pop_sum("population sum");
  for (int j = 0; j < J; ++j) {
    double sum = 0.0;
    for (int k : sc.subregions_of[j]) sum += ep.pop_subregion[k];
    double diff = std::abs(sum - ep.pop_region[j]);
    if (diff > 0.0) pop_sum.hit(diff, j);
  }
  pop_sum.commit(rep);

  FamilyBuilder inits("initial counts");
  for (int j = 0; j < J; ++j) {
    if (ep.init_i[j] < 0.0) inits.hit(-ep.init_i[j], j);
    if (ep.init_r[j] < 0.0) inits.hit(-ep.init_r[j], j);
    if (ep.init_itilde[j] < 0.0) inits.hit(-ep.init_itilde[j], j);
    if (ep.init_i[j] > ep.pop_region[j]) inits.hit(ep.init_i[j] - ep.pop_region[j], j);
    if (ep.init_r[j] > ep.pop_region[j]) inits.hit(ep.init_r[j] - ep.pop_region[j], j);
  }
  inits.commit(rep);

  return rep;
}

CostLedger compute_cost(const Scenario& sc, const AllocationPlan& plan) {
  const int J = sc.num_regions(), K = sc.num_subregions(), L = sc.num_pharmacies();
  const int O = sc.num_centers(), M = sc.num_suppliers(), T = sc.horizon;

  auto want = [&](std::size_t got, std::size_t expect, const char* what) {
    if (got != expect)
      fail("plan-index", std::string(what) + " has size " + std::to_string(got) +
                             ", scenario expects " + std::to_string(expect));
  };
  want(plan.psi.size(), J, "psi");
  want(plan.xi.size(), J, "xi");
  want(plan.phi.size(), K, "phi");
  want(plan.omega.size(), K, "omega");
  want(plan.g1.size(), M, "g1");
  want(plan.g2.size(), K, "g2");
  want(plan.g3.size(), L, "g3");
  want(plan.x.size(), O, "x");
  for (int j = 0; j < J; ++j) want(plan.psi[j].size(), T + 1, "psi period axis");

  CostLedger ledger;
  ledger.budget = sc.costs.budget;
  auto zero = std::vector<double>(T + 1, 0.0);
  ledger.administration = zero;
  ledger.purchase = zero;
  ledger.transport_1 = zero;
  ledger.transport_2 = zero;
  ledger.transport_3 = zero;
  ledger.holding_1 = zero;
  ledger.holding_2 = zero;
  ledger.holding_3 = zero;
  ledger.opening = zero;
  ledger.period_total = zero;
  ledger.cumulative = zero;

  for (int t = 0; t <= T; ++t) {
    for (int j = 0; j < J; ++j)
      ledger.administration[t] += sc.costs.admin_cost[j][t] * (plan.psi[j][t] + plan.xi[j][t]);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < J; ++j) {
        ledger.purchase[t] += sc.costs.dose_cost[i][t] * plan.g1[i][j][t];
        ledger.transport_1[t] += sc.costs.transport_1[i][j] * plan.g1[i][j][t];
      }
    for (int k = 0; k < K; ++k) ledger.transport_2[t] += sc.costs.transport_2[k] * plan.g2[k][t];
    for (int l = 0; l < L; ++l) ledger.transport_3[t] += sc.costs.transport_3[l] * plan.g3[l][t];
    for (int j = 0; j < J; ++j) ledger.holding_1[t] += sc.costs.holding_1[j] * plan.w1[j][t];
    for (int k = 0; k < K; ++k) ledger.holding_2[t] += sc.costs.holding_2[k] * plan.w2[k][t];
    for (int l = 0; l < L; ++l) ledger.holding_3[t] += sc.costs.holding_3[l] * plan.w3[l][t];
    for (int o = 0; o < O; ++o) {
      int prev = t > 0 ? plan.x[o][t - 1] : 0;
      if (plan.x[o][t] > prev) ledger.opening[t] += sc.costs.open_cost[o];
    }
    ledger.period_total[t] = ledger.administration[t] + ledger.purchase[t] + ledger.transport_1[t] +
                             ledger.transport_2[t] + ledger.transport_3[t] + ledger.holding_1[t] +
                             ledger.holding_2[t] + ledger.holding_3[t] + ledger.opening[t];
    ledger.total += ledger.period_total[t];
    ledger.cumulative[t] = ledger.total;
  }
  ledger.slack = ledger.budget - ledger.total;
  return ledger;
}

ObjectiveValues evaluate_objectives(const Scenario& sc, const AllocationPlan& plan,
                                    const Trajectory& traj, ObjectiveKind kind) {
  const int J = sc.num_regions(), T = sc.horizon;
  if (int(traj.states.size()) != T + 1)
    fail("trajectory-shape", "trajectory length does not match the scenario horizon");

  ObjectiveValues out;
  for (int j = 0; j < J; ++j)
    for (int t = 0; t <= T; ++t) out.infection_flux_total += traj.new_infections[j][t];

  for (int t = 0; t <= T; ++t) out.min_percapita_sum += plan.zeta[t];

  GiniReport gr = plan_equity_report(sc, plan);
  out.gini_max = gr.max_gini;

  double knap = 0.0;
  KnapsackWeights kw = scenario_priority_weights(sc);
  for (int t = 0; t <= T; ++t) {
    for (int k = 0; k < sc.num_subregions(); ++k)
      knap += kw.delta[k] * (plan.phi[k][t] + plan.omega[k][t]);
    for (int o = 0; o < sc.num_centers(); ++o) {
      int j = sc.region_of_center[o];
      knap += (1.0 - sc.access[j]) * sc.supply.center_capacity[o][t] * plan.x[o][t];
    }
    for (int j = 0; j < J; ++j) knap += sc.weights.lambda_reg * plan.nu[j][t];
  }
  out.knapsack_value = knap;

  double flux_scale = 1.0, dose_scale = 1.0;
  if (sc.weights.normalized) {
    double burden = 0.0, pop = 0.0;
    for (int j = 0; j < J; ++j) {
      burden += sc.epidemic.init_i[j] + sc.epidemic.init_r[j];
      pop += sc.epidemic.pop_region[j];
    }
    flux_scale = std::max(burden, 1.0);
    dose_scale = std::max(pop, 1.0);
  }

  const ObjectiveWeights& w = sc.weights;
  if (kind == ObjectiveKind::Gini) {
    out.scalarized = w.lambda0 * out.infection_flux_total / flux_scale +
                     w.lambda11 * out.min_percapita_sum - w.lambda12 * out.gini_max;
  } else {
    out.scalarized = w.lambda0 * out.infection_flux_total / flux_scale +
                     w.lambda21 * out.min_percapita_sum +
                     w.lambda22 * out.knapsack_value / dose_scale;
  }
  return out;
}

}  // namespace epivax
