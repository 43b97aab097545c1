#include <doctest.h>

#include "epivax/epidemic.hpp"
#include "epivax/oracle.hpp"
#include "epivax/synthetic.hpp"
#include "fixtures.hpp"

using namespace epivax;

TEST_CASE("with no supply the zero plan is the unique optimum") {
  Scenario sc = testing::flat_scenario(1, 2, 3);
  testing::set_uniform_beta(sc, 1.1);
  sc.supply.supplier_capacity[0].assign(sc.horizon + 1, 0.0);
  sc.centers_of = {{}};
  sc.supply.center_capacity = Matrix();
  sc.costs.open_cost = {};
  sc.finalize();
  GridSpec grid;
  grid.step = 100.0;
  OracleResult res = enumerate_optimum(sc, grid);
  for (int t = 0; t <= sc.horizon; ++t)
    CHECK(res.plan.psi[0][t] + res.plan.xi[0][t] == 0.0);
}

TEST_CASE("the oracle fills the earliest periods when dosing pays off") {
  Scenario sc = testing::flat_scenario(1, 1, 3);
  testing::set_uniform_beta(sc, 1.4);
  sc.supply.supplier_capacity[0].assign(sc.horizon + 1, 100.0);
  sc.supply.demand[0].assign(sc.horizon + 1, 100.0);
  sc.centers_of = {{}};
  sc.supply.center_capacity = Matrix();
  sc.costs.open_cost = {};
  sc.finalize();
  GridSpec grid;
  grid.step = 50.0;
  OracleResult res = enumerate_optimum(sc, grid);
  CHECK(res.plan.psi[0][1] + res.plan.xi[0][1] == doctest::Approx(100.0));
}

TEST_CASE("enumeration counts match the predicted grid product") {
  Scenario sc = testing::flat_scenario(1, 2, 2);
  testing::set_uniform_beta(sc, 1.2);
  sc.centers_of = {{}};
  sc.supply.center_capacity = Matrix();
  sc.costs.open_cost = {};
  sc.finalize();
  GridSpec grid;
  grid.step = 200.0;
  OracleResult res = enumerate_optimum(sc, grid);
  CHECK(res.visited == res.predicted);
  // demand 600 -> 4 levels per decision period, one region, two periods;
  // period 0 is fixed at zero.
  CHECK(res.predicted == 16);
}

TEST_CASE("the guard rejects oversized enumerations with the projected count") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  testing::set_uniform_beta(sc, 1.1);
  GridSpec grid;
  grid.step = 1.0;
  grid.guard = 1000;
  CHECK_THROWS_WITH_AS(enumerate_optimum(sc, grid), doctest::Contains("guard"), Error);
}

TEST_CASE("oracle plans verify and bound the heuristic objective") {
  for (std::uint64_t seed : {3u, 7u}) {
    SyntheticSpec spec = tiny_preset();
    spec.periods = 3;
    spec.subregions_per_region = 2;
    spec.centers_per_region = 0;
    Scenario sc = generate_synthetic(seed, spec);
    GridSpec grid;
    double mean_supply = 0.0;
    for (int t = 1; t <= sc.horizon; ++t)
      mean_supply += sc.supply.supplier_capacity[0][t] / sc.horizon;
    grid.step = std::max(mean_supply / 4.0, 1.0);
    OracleResult oracle = enumerate_optimum(sc, grid);
    DecompositionResult heur = run_knapsack_decomposition(sc);
    // The heuristic may outscore the grid only within the grid's resolution.
    CHECK(heur.objectives.scalarized <= oracle.objectives.scalarized + oracle.slack + 1e-6);
  }
}

TEST_CASE("the gap helper matches the direct computation") {
  Scenario sc = testing::flat_scenario(1, 1, 2);
  testing::set_uniform_beta(sc, 1.2);
  sc.centers_of = {{}};
  sc.supply.center_capacity = Matrix();
  sc.costs.open_cost = {};
  sc.finalize();
  GridSpec grid;
  grid.step = 250.0;
  OracleResult res = enumerate_optimum(sc, grid);
  double gap = gap_against_oracle(sc, res.objectives.scalarized * 0.97, grid);
  CHECK(gap == doctest::Approx(3.0));
}

TEST_CASE("the fairness objective variant enumerates with an equal split") {
  Scenario sc = testing::flat_scenario(1, 2, 2);
  testing::set_uniform_beta(sc, 1.2);
  sc.centers_of = {{}};
  sc.supply.center_capacity = Matrix();
  sc.costs.open_cost = {};
  sc.finalize();
  GridSpec grid;
  grid.step = 300.0;
  OracleResult res = enumerate_optimum(sc, grid, ObjectiveKind::Gini);
  CHECK(res.found);
  CHECK(res.objectives.gini_max <= 1e-9);  // per-capita waterfill splits evenly
}

TEST_CASE("a deliberately myopic plan scores a positive gap on an asymmetric fixture") {
  Scenario sc = testing::flat_scenario(2, 1, 3);
  testing::set_uniform_beta(sc, 1.3);
  sc.epidemic.beta[1][0] *= 2.0;  // region 1 is the hot spot
  sc.epidemic.beta[1][1] *= 2.0;
  sc.epidemic.beta[1][2] *= 2.0;
  sc.epidemic.beta[1][3] *= 2.0;
  sc.epidemic.beta_vax[1][0] *= 2.0;
  sc.epidemic.beta_vax[1][1] *= 2.0;
  sc.epidemic.beta_vax[1][2] *= 2.0;
  sc.epidemic.beta_vax[1][3] *= 2.0;
  sc.centers_of = {{}, {}};
  sc.supply.center_capacity = Matrix();
  sc.costs.open_cost = {};
  sc.finalize();
  sc.supply.supplier_capacity[0].assign(sc.horizon + 1, 200.0);
  GridSpec grid;
  grid.step = 100.0;
  OracleResult oracle = enumerate_optimum(sc, grid);

  // Send everything to the cold region, by hand.
  AllocationPlan myopic = AllocationPlan::zeros(sc);
  Trajectory base = simulate(sc, myopic);
  myopic.psi[0][1] = 200.0;
  myopic.phi[0][1] = 200.0;
  myopic.g1[0][0][1] = 200.0;
  myopic.g2[0][1] = 200.0;
  myopic.g3[0][1] = 200.0;
  Trajectory traj = simulate(sc, myopic);
  for (int j = 0; j < 2; ++j)
    for (int t = 0; t <= sc.horizon; ++t) {
      TriggerPair tp = trigger_indicators(traj, sc, j, t);
      myopic.trig_i[j][t] = tp.infection;
      myopic.trig_d[j][t] = tp.demand;
    }
  ObjectiveValues vals = evaluate_objectives(sc, myopic, traj);
  CHECK(optimality_gap(vals.scalarized, oracle.objectives.scalarized) > 0.0);
}
