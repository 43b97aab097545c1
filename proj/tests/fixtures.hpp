#pragma once

// Hand-built scenarios shared across the test suites.

#include "epivax/scenario.hpp"

namespace epivax::testing {

// One supplier, `regions` regions with `subs` sub-regions each (one pharmacy
// per sub-region, one candidate center per region), uniform parameters and
// no epidemic unless beta is set.
inline Scenario flat_scenario(int regions, int subs, int horizon, double pop_per_sub = 1000.0) {
  Scenario sc;
  sc.horizon = horizon;
  const int T1 = horizon + 1;
  sc.suppliers = {0};
  for (int j = 0; j < regions; ++j) sc.regions.push_back(j);
  int k_id = 0, l_id = 0;
  sc.subregions_of.resize(regions);
  sc.centers_of.resize(regions);
  for (int j = 0; j < regions; ++j) {
    for (int a = 0; a < subs; ++a) {
      sc.subregions_of[j].push_back(k_id++);
      sc.pharmacies_of.push_back({l_id++});
    }
    sc.centers_of[j].push_back(j);
  }
  const int K = k_id, L = l_id, O = regions;
  sc.finalize();

  EpidemicParams& ep = sc.epidemic;
  ep.mu = 14.0 / (75.0 * 365.0);
  ep.gamma = 1.0;
  ep.gamma1 = 1.0;
  ep.psi = 0;
  ep.sigma.assign(T1, 0.0);
  ep.t_r = 2;
  ep.beta = zeros(regions, T1);
  ep.beta_vax = zeros(regions, T1);
  ep.pop_region.assign(regions, pop_per_sub * subs);
  ep.pop_subregion.assign(K, pop_per_sub);
  ep.init_i.assign(regions, 10.0);
  ep.init_itilde.assign(regions, 0.0);
  ep.init_r.assign(regions, 0.0);

  SupplyParams& sp = sc.supply;
  sp.supplier_capacity = Matrix(1, std::vector<double>(T1, 500.0));
  sp.local_capacity = Matrix(K, std::vector<double>(T1, 400.0));
  sp.center_capacity = Matrix(O, std::vector<double>(T1, 300.0));
  sp.lead_center = 1;
  sp.lead_1.assign(1, std::vector<int>(regions, 0));
  sp.lead_2.assign(K, 0);
  sp.lead_3.assign(L, 0);
  sp.wastage = 0.0;
  sp.demand = Matrix(regions, std::vector<double>(T1, 600.0));

  CostParams& co = sc.costs;
  co.budget = 1e9;
  co.dose_cost = Matrix(1, std::vector<double>(T1, 10.0));
  co.transport_1.assign(1, std::vector<double>(regions, 1.0));
  co.transport_2.assign(K, 0.5);
  co.transport_3.assign(L, 0.25);
  co.holding_1.assign(regions, 0.1);
  co.holding_2.assign(K, 0.1);
  co.holding_3.assign(L, 0.1);
  co.open_cost.assign(O, 5000.0);
  co.admin_cost = Matrix(regions, std::vector<double>(T1, 5.0));

  sc.svi.assign(K, 0.5);
  sc.access.assign(regions, 0.5);
  return sc;
}

inline void set_uniform_beta(Scenario& sc, double growth) {
  for (int j = 0; j < sc.num_regions(); ++j)
    for (int t = 0; t <= sc.horizon; ++t) {
      sc.epidemic.beta[j][t] = growth / sc.epidemic.pop_region[j];
      sc.epidemic.beta_vax[j][t] = 0.2 * sc.epidemic.beta[j][t];
    }
}

}  // namespace epivax::testing
