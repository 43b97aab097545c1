#include "epivax/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace epivax {

SyntheticSpec tiny_preset() {
  SyntheticSpec spec;
  spec.regions = 2;
  spec.subregions_per_region = 2;
  spec.pharmacies_per_subregion = 2;
  spec.suppliers = 1;
  spec.periods = 4;
  spec.centers_per_region = 1;
  spec.population_scale = 50000.0;
  return spec;
}

Scenario generate_synthetic(std::uint64_t seed, const SyntheticSpec& spec) {
  if (spec.regions < 1 || spec.subregions_per_region < 1 || spec.pharmacies_per_subregion < 1 ||
      spec.suppliers < 1 || spec.periods < 1)
    fail("bad-spec", "all synthetic sizes must be at least 1");

  Rng rng(seed);
  Scenario sc;
  const int J = spec.regions;
  const int T = spec.periods;
  const int T1 = T + 1;
  sc.horizon = T;

  for (int i = 0; i < spec.suppliers; ++i) sc.suppliers.push_back(i);
  for (int j = 0; j < J; ++j) sc.regions.push_back(j);

  int k_id = 0, l_id = 0, o_id = 0;
  sc.subregions_of.resize(J);
  sc.centers_of.resize(J);
  for (int j = 0; j < J; ++j) {
    for (int a = 0; a < spec.subregions_per_region; ++a) {
      sc.subregions_of[j].push_back(k_id++);
      sc.pharmacies_of.emplace_back();
      for (int b = 0; b < spec.pharmacies_per_subregion; ++b)
        sc.pharmacies_of.back().push_back(l_id++);
    }
    for (int c = 0; c < spec.centers_per_region; ++c) sc.centers_of[j].push_back(o_id++);
  }
  const int K = k_id, L = l_id, O = o_id, M = spec.suppliers;
  sc.finalize();

  EpidemicParams& ep = sc.epidemic;
  ep.sigma.assign(T1, spec.with_reinfection ? rng.uniform(0.0, 1.0 / 6.0) : 0.0);
  ep.t_r = 2;
  ep.pop_region.assign(J, 0.0);
  ep.pop_subregion.assign(K, 0.0);
  for (int j = 0; j < J; ++j) {
    double pop = spec.population_scale * rng.uniform(0.6, 1.6);
    pop = std::round(pop);
    const auto& subs = sc.subregions_of[j];
    std::vector<double> parts(subs.size());
    double sum = 0.0;
    for (double& p : parts) { p = rng.uniform(0.5, 1.5); sum += p; }
    double assigned = 0.0;
    for (std::size_t a = 0; a + 1 < subs.size(); ++a) {
      double share = std::round(pop * parts[a] / sum);
      ep.pop_subregion[subs[a]] = share;
      assigned += share;
    }
    ep.pop_subregion[subs.back()] = pop - assigned;
    ep.pop_region[j] = pop;
  }

  ep.beta = zeros(J, T1);
  ep.beta_vax = zeros(J, T1);
  ep.init_i.assign(J, 0.0);
  ep.init_itilde.assign(J, 0.0);
  ep.init_r.assign(J, 0.0);
  for (int j = 0; j < J; ++j) {
    // Growth factor per period ~ beta * N; keep it in a band where the
    // uncontrolled dynamics stay well-posed over the horizon.
    double growth = rng.uniform(spec.growth_low, spec.growth_high);
    for (int t = 0; t < T1; ++t) {
      double wobble = rng.uniform(0.85, 1.15);
      ep.beta[j][t] = growth * wobble / ep.pop_region[j];
      ep.beta_vax[j][t] = 0.2 * ep.beta[j][t];
    }
    ep.init_i[j] = std::round(ep.pop_region[j] * rng.uniform(0.001, 0.01));
    ep.init_r[j] = std::round(ep.pop_region[j] * rng.uniform(0.0, 0.02));
  }

  SupplyParams& sp = sc.supply;
  sp.lead_center = 1;
  sp.lead_1.assign(M, std::vector<int>(J, 0));
  sp.lead_2.assign(K, 0);
  sp.lead_3.assign(L, 0);
  sp.wastage = 0.0;
  sp.demand = zeros(J, T1);
  double total_period_demand = 0.0;
  for (int j = 0; j < J; ++j) {
    double horizon_demand = ep.pop_region[j] * spec.demand_share;
    for (int t = 0; t < T1; ++t) {
      sp.demand[j][t] = std::round(horizon_demand / T * rng.uniform(0.8, 1.2));
      if (t >= 1) total_period_demand += sp.demand[j][t];
    }
  }
  total_period_demand /= double(T);

  sp.supplier_capacity = zeros(M, T1);
  for (int t = 0; t < T1; ++t) {
    double period_supply = total_period_demand * spec.supply_factor;
    std::vector<double> parts(M);
    double sum = 0.0;
    for (double& p : parts) { p = rng.uniform(0.5, 1.5); sum += p; }
    for (int i = 0; i < M; ++i)
      sp.supplier_capacity[i][t] = std::round(period_supply * parts[i] / sum);
  }

  sp.local_capacity = zeros(K, T1);
  for (int k = 0; k < K; ++k) {
    double share = rng.uniform(0.15, 0.4);  // per-period administration capacity
    for (int t = 0; t < T1; ++t)
      sp.local_capacity[k][t] = std::round(ep.pop_subregion[k] * share);
  }
  sp.center_capacity = zeros(O, T1);
  for (int o = 0; o < O; ++o) {
    int j = sc.region_of_center[o];
    double cap = std::min(10000.0, std::round(ep.pop_region[j] * rng.uniform(0.04, 0.10)));
    for (int t = 0; t < T1; ++t) sp.center_capacity[o][t] = cap;
  }

  CostParams& co = sc.costs;
  co.dose_cost = zeros(M, T1);
  for (int i = 0; i < M; ++i) {
    double price = rng.uniform(10.0, 24.0);  // calibrated dose-price band
    for (int t = 0; t < T1; ++t) co.dose_cost[i][t] = price * rng.uniform(0.95, 1.05);
  }
  co.transport_1.assign(M, std::vector<double>(J, 0.0));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < J; ++j) co.transport_1[i][j] = rng.uniform(0.5, 2.0);
  co.transport_2.assign(K, 0.0);
  for (double& v : co.transport_2) v = rng.uniform(0.2, 1.0);
  co.transport_3.assign(L, 0.0);
  for (double& v : co.transport_3) v = rng.uniform(0.1, 0.5);
  co.holding_1.assign(J, 0.0);
  for (double& v : co.holding_1) v = rng.uniform(0.05, 0.2);
  co.holding_2.assign(K, 0.0);
  for (double& v : co.holding_2) v = rng.uniform(0.05, 0.2);
  co.holding_3.assign(L, 0.0);
  for (double& v : co.holding_3) v = rng.uniform(0.05, 0.2);
  co.open_cost.assign(O, 0.0);
  for (double& v : co.open_cost) v = std::round(rng.uniform(2e4, 2e5));
  co.admin_cost = zeros(J, T1);
  for (int j = 0; j < J; ++j) {
    double fee = rng.uniform(5.0, 15.0);
    for (int t = 0; t < T1; ++t) co.admin_cost[j][t] = fee;
  }

  // Budget relative to buying and moving the whole supply each period.
  double max_price = 0.0;
  for (int i = 0; i < M; ++i)
    for (int t = 0; t < T1; ++t) max_price = std::max(max_price, co.dose_cost[i][t]);
  double per_period_supply = total_period_demand * spec.supply_factor;
  double spend_estimate = per_period_supply * double(T) * (max_price + 20.0);
  co.budget = std::round(spend_estimate * spec.budget_factor);

  sc.svi.assign(K, 0.0);
  for (double& v : sc.svi) v = rng.uniform(0.0, 1.0);
  sc.access.assign(J, 0.0);
  for (double& v : sc.access) v = rng.uniform(0.2, 0.9);

  // Weight profile with the infection objective dominant and a strong
  // regional floor, the configuration the reference runs lead with.
  sc.weights.lambda0 = -1.0;
  sc.weights.lambda11 = 100.0;
  sc.weights.lambda12 = 1.0;
  sc.weights.lambda21 = 100.0;
  sc.weights.lambda22 = 1e-3;
  sc.weights.lambda_reg = 10.0;

  sc.finalize();
  FeasibilityReport rep = validate_scenario(sc);
  if (!rep.feasible) fail("generator-internal", rep.to_string());
  return sc;
}

}  // namespace epivax
