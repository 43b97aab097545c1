#include <doctest.h>

#include "epivax/epidemic.hpp"
#include "fixtures.hpp"

using namespace epivax;

TEST_CASE("step with pure removal empties the infected stock") {
  StepInputs in;
  in.s = 100.0;
  in.v = 5.0;
  in.i = 10.0;
  in.r = 0.0;
  in.n = 115.0;
  in.gamma = 1.0;
  RegionState out = step(in);
  CHECK(out.i == doctest::Approx(0.0));
  CHECK(out.r == doctest::Approx(10.0));
  CHECK(out.s == doctest::Approx(100.0));
  CHECK(out.v == doctest::Approx(5.0));
}

TEST_CASE("step applies the infection flux to both stocks") {
  StepInputs in;
  in.s = 1000.0;
  in.i = 10.0;
  in.r = 0.0;
  in.n = 1010.0;
  in.beta = 1e-4;
  in.gamma = 1.0;
  RegionState out = step(in);
  // flux = 1e-4 * 1000 * 10 = 1
  CHECK(out.s == doctest::Approx(999.0));
  CHECK(out.i == doctest::Approx(1.0));
  CHECK(out.r == doctest::Approx(10.0));
}

TEST_CASE("step raises on a compartment underflow instead of clamping") {
  StepInputs in;
  in.s = 10.0;
  in.n = 10.0;
  in.dose_lagged = 50.0;  // more doses than susceptible people
  CHECK_THROWS_AS(step(in), Error);
}

TEST_CASE("conservation holds without recruitment, reinfection or recovered dosing") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    StepInputs in;
    in.s = rng.uniform(0.0, 1e6);
    in.v = rng.uniform(0.0, 1e5);
    in.i = rng.uniform(0.0, 1e4);
    in.r = rng.uniform(0.0, 1e5);
    in.n = in.s + in.v + in.i + in.r;
    in.beta = rng.uniform(0.0, 0.5) / in.n;
    in.beta_vax = 0.2 * in.beta;
    in.gamma = rng.uniform(0.2, 1.0);
    in.gamma1 = 1.0;
    in.psi = trial % 2;
    in.dose_lagged = rng.uniform(0.0, in.s * 0.5);
    RegionState out = step(in);
    double before = in.s + in.v + in.i + in.r;
    double after = out.s + out.v + out.i + out.r;
    CHECK(std::abs(after - before) <= 1e-9 * std::max(1.0, before));
  }
}

TEST_CASE("reinfection inflow is zero before the immunity duration") {
  Scenario sc = testing::flat_scenario(1, 1, 5);
  testing::set_uniform_beta(sc, 1.0);
  sc.epidemic.sigma.assign(sc.horizon + 1, 1.0 / 6.0);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  CHECK(reinfection_inflow(traj, sc, 0, 0) == 0.0);
  CHECK(reinfection_inflow(traj, sc, 0, 1) == 0.0);
  double flux0 = traj.new_infections[0][0];
  CHECK(reinfection_inflow(traj, sc, 0, 2) == doctest::Approx(flux0 / 6.0));
}

TEST_CASE("reinfection inflow matches the rate times the lagged flux") {
  Scenario sc = testing::flat_scenario(1, 1, 4);
  sc.epidemic.sigma.assign(sc.horizon + 1, 1.0 / 6.0);
  testing::set_uniform_beta(sc, 1.2);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  int t = 3, tr = sc.epidemic.t_r;
  const EpidemicState& past = traj.states[t - tr];
  double expected = (1.0 / 6.0) * (sc.epidemic.beta[0][t - tr] * past.s[0] +
                                   sc.epidemic.beta_vax[0][t - tr] * past.v[0]) * past.i[0];
  CHECK(traj.states[t].itilde[0] == doctest::Approx(expected));
}

TEST_CASE("simulation without transmission or recruitment is static") {
  Scenario sc = testing::flat_scenario(2, 2, 6);
  sc.epidemic.mu = 1e-12;  // validation requires positive recruitment
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  for (int t = 1; t <= sc.horizon; ++t) {
    CHECK(traj.states[t].s[0] == doctest::Approx(traj.states[0].s[0]));
    CHECK(traj.states[t].v[0] == doctest::Approx(0.0));
  }
}

TEST_CASE("dosing never increases the susceptible stock later on") {
  Scenario sc = testing::flat_scenario(1, 2, 6);
  testing::set_uniform_beta(sc, 1.1);
  AllocationPlan none = AllocationPlan::zeros(sc);
  AllocationPlan dosed = AllocationPlan::zeros(sc);
  dosed.psi[0][1] = 200.0;
  dosed.psi[0][2] = 100.0;
  Trajectory base = simulate(sc, none);
  Trajectory with = simulate(sc, dosed);
  for (int t = 0; t <= sc.horizon; ++t)
    CHECK(with.states[t].s[0] <= base.states[t].s[0] + 1e-9);
}

TEST_CASE("threshold uses the half-initial-pressure branch early on") {
  Scenario sc = testing::flat_scenario(1, 1, 5);
  sc.epidemic.init_i[0] = 10.0;
  sc.epidemic.pop_region[0] = 1000.0 + 10.0;  // S0 = 1000 once seeded
  sc.epidemic.pop_subregion[0] = sc.epidemic.pop_region[0];
  sc.epidemic.beta[0][0] = 1e-4;
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  CHECK(traj.tau[0][0] == doctest::Approx(0.5 * 1e-4 * 1000.0 * 10.0));
}

TEST_CASE("threshold averages the last three fluxes once available") {
  Scenario sc = testing::flat_scenario(1, 1, 5);
  testing::set_uniform_beta(sc, 1.3);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  double expected = (traj.new_infections[0][0] + traj.new_infections[0][1] +
                     traj.new_infections[0][2]) / 3.0;
  CHECK(traj.tau[0][3] == doctest::Approx(expected));
  CHECK(traj.tau[0][3] >= 0.0);
}

TEST_CASE("zero initial infections give a zero threshold") {
  Scenario sc = testing::flat_scenario(1, 1, 4);
  sc.epidemic.init_i[0] = 0.0;
  sc.epidemic.beta[0][0] = 1e-4;
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  CHECK(traj.tau[0][0] == 0.0);
}

TEST_CASE("triggers are suppressed before the center lead time") {
  Scenario sc = testing::flat_scenario(1, 1, 4);
  testing::set_uniform_beta(sc, 2.0);
  sc.supply.demand[0].assign(sc.horizon + 1, 1e6);  // demand above capacity
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  TriggerPair at0 = trigger_indicators(traj, sc, 0, 0);
  CHECK_FALSE(at0.infection);
  CHECK_FALSE(at0.demand);
  TriggerPair at1 = trigger_indicators(traj, sc, 0, 1);
  CHECK(at1.demand);  // capacity 400 < demand 1e6
}

TEST_CASE("infection trigger requires strict exceedance") {
  Scenario sc = testing::flat_scenario(1, 1, 4);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  // With zero transmission both flux and threshold vanish; the tie must not fire.
  Trajectory traj = simulate(sc, plan);
  TriggerPair tp = trigger_indicators(traj, sc, 0, 2);
  CHECK_FALSE(tp.infection);
}

TEST_CASE("simulation is a pure function of its inputs") {
  Scenario sc = testing::flat_scenario(2, 2, 5);
  testing::set_uniform_beta(sc, 1.2);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  plan.psi[0][1] = 50.0;
  Trajectory a = simulate(sc, plan);
  Trajectory b = simulate(sc, plan);
  for (int t = 0; t <= sc.horizon; ++t) {
    CHECK(a.states[t].s == b.states[t].s);
    CHECK(a.states[t].i == b.states[t].i);
  }
}
