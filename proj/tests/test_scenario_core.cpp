#include <doctest.h>

#include "epivax/epidemic.hpp"
#include "epivax/optimizer.hpp"
#include "fixtures.hpp"

using namespace epivax;

TEST_CASE("validate_scenario accepts a well-formed two-region scenario") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  CHECK(validate_scenario(sc).feasible);
}

TEST_CASE("validate_scenario flags a vaccinated rate above the base rate") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  testing::set_uniform_beta(sc, 1.0);
  for (int t = 0; t <= sc.horizon; ++t)
    sc.epidemic.beta_vax[0][t] = 2.0 * sc.epidemic.beta[0][t];
  FeasibilityReport rep = validate_scenario(sc);
  CHECK_FALSE(rep.feasible);
  REQUIRE(rep.family("beta ordering") != nullptr);
  CHECK_FALSE(rep.family("beta ordering")->pass);
}

TEST_CASE("validate_scenario reports the population shortfall magnitude") {
  Scenario sc = testing::flat_scenario(1, 2, 4);
  sc.epidemic.pop_subregion[0] -= 5.0;
  FeasibilityReport rep = validate_scenario(sc);
  CHECK_FALSE(rep.feasible);
  REQUIRE(rep.family("population sum") != nullptr);
  CHECK(rep.family("population sum")->worst_violation == doctest::Approx(5.0));
}

TEST_CASE("compute_cost of the zero plan is zero with full slack") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  CostLedger ledger = compute_cost(sc, AllocationPlan::zeros(sc));
  CHECK(ledger.total == 0.0);
  CHECK(ledger.slack == sc.costs.budget);
}

TEST_CASE("compute_cost prices a single first-leg shipment") {
  Scenario sc = testing::flat_scenario(1, 1, 2);
  sc.costs.dose_cost[0].assign(sc.horizon + 1, 10.0);
  sc.costs.transport_1[0][0] = 1.0;
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.g1[0][0][1] = 100.0;
  CostLedger ledger = compute_cost(sc, plan);
  CHECK(ledger.total == doctest::Approx(1100.0));
  CHECK(ledger.purchase[1] == doctest::Approx(1000.0));
  CHECK(ledger.transport_1[1] == doctest::Approx(100.0));
}

TEST_CASE("compute_cost charges a center opening exactly once") {
  Scenario sc = testing::flat_scenario(1, 1, 3);
  sc.costs.open_cost[0] = 5000.0;
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.x[0][1] = 1;
  plan.x[0][2] = 1;
  CostLedger ledger = compute_cost(sc, plan);
  CHECK(ledger.opening[1] == doctest::Approx(5000.0));
  CHECK(ledger.opening[2] == 0.0);
  CHECK(ledger.total == doctest::Approx(5000.0));
}

TEST_CASE("compute_cost is additive over disjoint-support plans") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  AllocationPlan a = AllocationPlan::zeros(sc);
  AllocationPlan b = AllocationPlan::zeros(sc);
  a.psi[0][1] = 100.0;
  a.g1[0][0][1] = 100.0;
  b.psi[1][2] = 50.0;
  b.g2[2][2] = 50.0;
  AllocationPlan both = AllocationPlan::zeros(sc);
  both.psi[0][1] = 100.0;
  both.g1[0][0][1] = 100.0;
  both.psi[1][2] = 50.0;
  both.g2[2][2] = 50.0;
  double sum = compute_cost(sc, a).total + compute_cost(sc, b).total;
  CHECK(compute_cost(sc, both).total == doctest::Approx(sum));
}

TEST_CASE("compute_cost rejects index-mismatched plans naming the axis") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.psi.pop_back();
  CHECK_THROWS_WITH_AS(compute_cost(sc, plan),
                       doctest::Contains("psi"), Error);
}

TEST_CASE("objective evaluation sums fluxes with the stored weights") {
  Scenario sc = testing::flat_scenario(1, 1, 2);
  sc.weights.lambda0 = -1.0;
  sc.weights.lambda21 = 0.0;
  sc.weights.lambda22 = 0.0;
  sc.weights.lambda_reg = 0.0;
  // Hand-crafted fluxes 3 then 4: beta * S * I with S0=990, I0=10.
  sc.epidemic.init_i[0] = 10.0;
  sc.epidemic.mu = 1e-15;
  sc.epidemic.gamma = 1.0;
  Scenario tuned = sc;
  tuned.epidemic.beta[0][0] = 3.0 / (990.0 * 10.0);
  // After one step: I1 = flux0 = 3, S1 = 990 - 3 = 987 (gamma clears I).
  tuned.epidemic.beta[0][1] = 4.0 / (987.0 * 3.0);
  tuned.epidemic.beta[0][2] = 0.0;
  AllocationPlan plan = AllocationPlan::zeros(tuned);
  Trajectory traj = simulate(tuned, plan);
  ObjectiveValues vals = evaluate_objectives(tuned, plan, traj);
  CHECK(vals.infection_flux_total == doctest::Approx(7.0));
  CHECK(vals.scalarized == doctest::Approx(-7.0));
}

TEST_CASE("objective evaluation is linear in each weight") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  testing::set_uniform_beta(sc, 1.1);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.psi[0][1] = 100.0;
  plan.phi[0][1] = 100.0;
  plan.zeta[1] = 0.01;
  Trajectory traj = simulate(sc, plan);
  ObjectiveValues base = evaluate_objectives(sc, plan, traj);
  Scenario doubled = sc;
  doubled.weights.lambda21 *= 2.0;
  ObjectiveValues up = evaluate_objectives(doubled, plan, traj);
  double zeta_term = base.min_percapita_sum * sc.weights.lambda21;
  CHECK(up.scalarized - base.scalarized == doctest::Approx(zeta_term));
}

TEST_CASE("normalized mode rescales flux by burden and doses by population") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  testing::set_uniform_beta(sc, 1.2);
  sc.epidemic.init_r = {50.0, 30.0};
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.psi[0][1] = 120.0;
  plan.phi[0][1] = 120.0;
  Trajectory traj = simulate(sc, plan);
  ObjectiveValues raw = evaluate_objectives(sc, plan, traj);
  Scenario normed = sc;
  normed.weights.normalized = true;
  ObjectiveValues scaled = evaluate_objectives(normed, plan, traj);
  double burden = 10.0 + 50.0 + 10.0 + 30.0;  // initial infected plus removed
  double pop = sc.epidemic.pop_region[0] + sc.epidemic.pop_region[1];
  double expect = sc.weights.lambda0 * raw.infection_flux_total / burden +
                  sc.weights.lambda21 * raw.min_percapita_sum +
                  sc.weights.lambda22 * raw.knapsack_value / pop;
  CHECK(scaled.scalarized == doctest::Approx(expect));
  CHECK(scaled.infection_flux_total == doctest::Approx(raw.infection_flux_total));
}

TEST_CASE("zero plans satisfy the full formulation") {
  Scenario sc = testing::flat_scenario(2, 2, 5);
  testing::set_uniform_beta(sc, 1.2);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  // Indicator fields must match the realized dynamics.
  for (int j = 0; j < sc.num_regions(); ++j)
    for (int t = 0; t <= sc.horizon; ++t) {
      TriggerPair tp = trigger_indicators(traj, sc, j, t);
      plan.trig_i[j][t] = tp.infection;
      plan.trig_d[j][t] = tp.demand;
    }
  FeasibilityReport rep = check_full_feasibility(sc, plan, traj, 1e-6);
  CHECK(rep.feasible);
}

TEST_CASE("demand violations are pinned to their region and period") {
  Scenario sc = testing::flat_scenario(2, 1, 3);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.psi[1][2] = sc.supply.demand[1][2] + 50.0;
  Trajectory traj = simulate(sc, plan);
  FeasibilityReport rep = check_full_feasibility(sc, plan, traj, 1e-6);
  CHECK_FALSE(rep.feasible);
  const FeasibilityFamily* fam = rep.family("demand");
  REQUIRE(fam != nullptr);
  CHECK_FALSE(fam->pass);
  CHECK(fam->region == 1);
  CHECK(fam->period == 2);
}

TEST_CASE("flow imbalance is caught by the balance family") {
  Scenario sc = testing::flat_scenario(1, 1, 3);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.g1[0][0][1] = 100.0;  // bought but never moved or held
  Trajectory traj = simulate(sc, plan);
  FeasibilityReport rep = check_full_feasibility(sc, plan, traj, 1e-6);
  CHECK_FALSE(rep.feasible);
  REQUIRE(rep.family("flow-balance") != nullptr);
  CHECK_FALSE(rep.family("flow-balance")->pass);
}

TEST_CASE("balanced hand-built inventories pass every balance family") {
  Scenario sc = testing::flat_scenario(1, 1, 3);
  sc.epidemic.mu = 1e-12;
  AllocationPlan plan = AllocationPlan::zeros(sc);
  // Buy 10 at t=1, hold one period at the sub-regional hub, administer at t=2.
  plan.g1[0][0][1] = 10.0;
  plan.g2[0][1] = 10.0;
  plan.w2[0][1] = 10.0;
  plan.g3[0][2] = 10.0;
  plan.phi[0][2] = 10.0;
  plan.psi[0][2] = 10.0;
  Trajectory traj = simulate(sc, plan);
  for (int t = 0; t <= sc.horizon; ++t) {
    TriggerPair tp = trigger_indicators(traj, sc, 0, t);
    plan.trig_i[0][t] = tp.infection;
    plan.trig_d[0][t] = tp.demand;
  }
  FeasibilityReport rep = check_full_feasibility(sc, plan, traj, 1e-6);
  CHECK(rep.feasible);
}

TEST_CASE("each corrupted quantity trips its own family") {
  Scenario sc = testing::flat_scenario(2, 2, 4);
  testing::set_uniform_beta(sc, 1.1);
  DecompositionResult res = run_knapsack_decomposition(sc);
  auto trips = [&](void (*mutate)(AllocationPlan&), const char* family) {
    AllocationPlan plan = res.plan;
    mutate(plan);
    FeasibilityReport rep = check_full_feasibility(sc, plan, res.trajectory, 1e-6);
    const FeasibilityFamily* fam = rep.family(family);
    REQUIRE(fam != nullptr);
    CHECK_FALSE(fam->pass);
  };
  trips([](AllocationPlan& p) { p.phi[0][2] += 1e4; }, "capacity");
  trips([](AllocationPlan& p) { p.psi[0][2] += 1.0; }, "linking");
  trips([](AllocationPlan& p) { p.nu[0][2] = 1.0; }, "min-share");
  trips([](AllocationPlan& p) { p.zeta[2] = 1.0; }, "equity-floor");
  trips([](AllocationPlan& p) { p.g3[0][2] += 5.0; }, "flow-balance");
  trips([](AllocationPlan& p) { p.omega[1][1] = -3.0; }, "nonnegativity");
  trips([](AllocationPlan& p) { p.psi[0][0] = 10.0; }, "initial-zero");
}

TEST_CASE("budget overruns fail the budget family") {
  Scenario sc = testing::flat_scenario(1, 1, 2);
  sc.costs.budget = 100.0;
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.g1[0][0][1] = 100.0;
  plan.w1[0][1] = 100.0;
  plan.w1[0][2] = 100.0;
  Trajectory traj = simulate(sc, plan);
  FeasibilityReport rep = check_full_feasibility(sc, plan, traj, 1e-6);
  REQUIRE(rep.family("budget") != nullptr);
  CHECK_FALSE(rep.family("budget")->pass);
}
