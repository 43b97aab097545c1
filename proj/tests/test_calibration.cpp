#include <doctest.h>

#include "epivax/calibration.hpp"
#include "epivax/epidemic.hpp"
#include "fixtures.hpp"

using namespace epivax;

TEST_CASE("underreporting adjustment divides by the reporting share") {
  CHECK(adjust_underreporting(100.0, 0.0) == doctest::Approx(100.0));
  CHECK(adjust_underreporting(100.0, 0.5) == doctest::Approx(200.0));
  CHECK(adjust_underreporting(7.0, 0.3) == doctest::Approx(10.0));
  CHECK_THROWS_AS(adjust_underreporting(1.0, 1.0), Error);
}

TEST_CASE("underreporting adjustment is monotone in both arguments") {
  CHECK(adjust_underreporting(10.0, 0.2) < adjust_underreporting(11.0, 0.2));
  CHECK(adjust_underreporting(10.0, 0.2) < adjust_underreporting(10.0, 0.3));
}

TEST_CASE("effective reproduction follows the printed formula") {
  CHECK(effective_reproduction(2.0, 1.0, 1000.0, 1000.0) == doctest::Approx(0.0));
  CHECK(effective_reproduction(2.0, 1.0, 500.0, 1000.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(effective_reproduction(1.0, 1.0, 1.0, 0.0), Error);
}

namespace {

// Round-trip input: simulate with a known rate series and observe the
// incidence as reported cases.
ObservedSeries observe(const Scenario& sc, const AllocationPlan& plan, const Trajectory& traj) {
  ObservedSeries obs;
  obs.num_regions = sc.num_regions();
  obs.num_periods = sc.horizon;  // periods 0..T-1 drive transitions
  obs.reported_cases = zeros(obs.num_regions, obs.num_periods);
  obs.doses_administered = zeros(obs.num_regions, obs.num_periods);
  obs.population = sc.epidemic.pop_region;
  for (int j = 0; j < obs.num_regions; ++j)
    for (int t = 0; t < obs.num_periods; ++t) {
      obs.reported_cases[j][t] = traj.new_infections[j][t];
      obs.doses_administered[j][t] = plan.psi[j][t];
    }
  return obs;
}

}  // namespace

TEST_CASE("zero cases and zero doses recover a zero rate with static susceptibles") {
  ObservedSeries obs;
  obs.num_regions = 1;
  obs.num_periods = 5;
  obs.reported_cases = zeros(1, 5);
  obs.doses_administered = zeros(1, 5);
  obs.population = {1000.0};
  EpidemicParams params;
  params.mu = 0.0;
  CalibratedRates rates = calibrate_effective_rates(obs, params);
  // The unit seed dies out after one period (gamma 1), so only the first
  // cell is solvable; susceptibles stay put throughout.
  CHECK(rates.beta[0][0] == doctest::Approx(0.0));
  CHECK_FALSE(rates.missing[0][0]);
  for (int t = 1; t < 5; ++t) CHECK(rates.missing[0][t]);
  for (int t = 0; t < 5; ++t) {
    CHECK(rates.beta[0][t] == doctest::Approx(0.0));
    CHECK(rates.susceptible[0][t] == doctest::Approx(999.0));
  }
}

TEST_CASE("calibration recovers the generating rates from a simulated epidemic") {
  Scenario sc = testing::flat_scenario(2, 1, 8, 50000.0);
  sc.epidemic.init_i = {1.0, 1.0};
  sc.epidemic.init_r = {0.0, 0.0};
  sc.epidemic.init_itilde = {0.0, 0.0};
  Rng rng(99);
  for (int j = 0; j < 2; ++j)
    for (int t = 0; t <= sc.horizon; ++t) {
      sc.epidemic.beta[j][t] = rng.uniform(0.8, 1.6) / sc.epidemic.pop_region[j];
      sc.epidemic.beta_vax[j][t] = 0.2 * sc.epidemic.beta[j][t];
    }
  AllocationPlan plan = AllocationPlan::zeros(sc);
  for (int j = 0; j < 2; ++j)
    for (int t = 1; t + 2 <= sc.horizon; ++t) plan.psi[j][t] = 40.0 + 10.0 * j;
  Trajectory traj = simulate(sc, plan);
  ObservedSeries obs = observe(sc, plan, traj);

  CalibratedRates rates = calibrate_effective_rates(obs, sc.epidemic);
  for (int j = 0; j < 2; ++j)
    for (int t = 0; t < obs.num_periods; ++t) {
      REQUIRE_FALSE(rates.missing[j][t]);
      CHECK(rates.beta[j][t] ==
            doctest::Approx(sc.epidemic.beta[j][t]).epsilon(1e-8));
      CHECK(rates.beta_vax[j][t] == doctest::Approx(0.2 * rates.beta[j][t]));
    }
}

TEST_CASE("rate units scale inversely with a joint rescaling of the data") {
  Scenario sc = testing::flat_scenario(1, 1, 6, 20000.0);
  sc.epidemic.init_i = {1.0};
  sc.epidemic.init_r = {0.0};
  testing::set_uniform_beta(sc, 1.2);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  Trajectory traj = simulate(sc, plan);
  ObservedSeries obs = observe(sc, plan, traj);

  CalibratedRates base = calibrate_effective_rates(obs, sc.epidemic);
  ObservedSeries doubled = obs;
  for (auto& row : doubled.reported_cases)
    for (double& v : row) v *= 2.0;
  for (auto& row : doubled.doses_administered)
    for (double& v : row) v *= 2.0;
  doubled.population[0] *= 2.0;
  CalibratedRates scaled = calibrate_effective_rates(doubled, sc.epidemic);
  // Doubling counts halves the per-person rate, up to the unit seed.
  CHECK(scaled.beta[0][2] == doctest::Approx(base.beta[0][2] / 2.0).epsilon(1e-2));
}

TEST_CASE("singular systems are flagged per cell rather than failing the run") {
  ObservedSeries obs;
  obs.num_regions = 1;
  obs.num_periods = 3;
  obs.reported_cases = zeros(1, 3);
  obs.doses_administered = zeros(1, 3);
  obs.reported_cases[0][1] = 5.0;  // cases appear while I = 0
  obs.population = {1000.0};
  EpidemicParams params;
  params.mu = 0.0;
  CalibrationOptions opt;
  opt.seed_unit_infection = false;
  params.init_i = {0.0};
  CalibratedRates rates = calibrate_effective_rates(obs, params, opt);
  CHECK(rates.missing[0][0]);
  CHECK_FALSE(rates.notes.empty());
}

TEST_CASE("gap interpolation fills flagged cells from the neighbors") {
  ObservedSeries obs;
  obs.num_regions = 1;
  obs.num_periods = 3;
  obs.reported_cases = zeros(1, 3);
  obs.doses_administered = zeros(1, 3);
  obs.population = {100.0};
  EpidemicParams params;
  params.mu = 0.0;
  params.init_i = {0.0};  // I stays zero, every solve is singular
  CalibrationOptions opt;
  opt.seed_unit_infection = false;
  opt.interpolate_gaps = true;
  CalibratedRates rates = calibrate_effective_rates(obs, params, opt);
  for (int t = 0; t < 3; ++t) CHECK(rates.beta[0][t] == 0.0);
}
