#include <doctest.h>

#include "epivax/sensitivity.hpp"
#include "epivax/synthetic.hpp"
#include "fixtures.hpp"

using namespace epivax;

TEST_CASE("multipliers act on the right parameter") {
  Scenario sc = testing::flat_scenario(1, 1, 3);
  testing::set_uniform_beta(sc, 1.0);
  Scenario budget = apply_multiplier(sc, SensitivityParameter::Budget, 1.5,
                                     EffectivenessReading::Effectiveness);
  CHECK(budget.costs.budget == doctest::Approx(1.5 * sc.costs.budget));
  Scenario supply = apply_multiplier(sc, SensitivityParameter::Supply, 0.5,
                                     EffectivenessReading::Effectiveness);
  CHECK(supply.supply.supplier_capacity[0][1] ==
        doctest::Approx(0.5 * sc.supply.supplier_capacity[0][1]));
  Scenario rate = apply_multiplier(sc, SensitivityParameter::InfectionRate, 1.2,
                                   EffectivenessReading::Effectiveness);
  CHECK(rate.epidemic.beta[0][1] == doctest::Approx(1.2 * sc.epidemic.beta[0][1]));
  CHECK(rate.epidemic.beta_vax[0][1] == doctest::Approx(1.2 * sc.epidemic.beta_vax[0][1]));
  Scenario cap = apply_multiplier(sc, SensitivityParameter::Capacity, 2.0,
                                  EffectivenessReading::Effectiveness);
  CHECK(cap.supply.local_capacity[0][1] == doctest::Approx(2.0 * sc.supply.local_capacity[0][1]));
  CHECK(cap.supply.center_capacity[0][1] ==
        doctest::Approx(2.0 * sc.supply.center_capacity[0][1]));
  Scenario dem = apply_multiplier(sc, SensitivityParameter::Demand, 0.8,
                                  EffectivenessReading::Effectiveness);
  CHECK(dem.supply.demand[0][1] == doctest::Approx(0.8 * sc.supply.demand[0][1]));
}

TEST_CASE("the two effectiveness readings scale the vaccinated rate differently") {
  Scenario sc = testing::flat_scenario(1, 1, 2);
  testing::set_uniform_beta(sc, 1.0);  // ratio 0.2, effectiveness 0.8
  double beta = sc.epidemic.beta[0][1];

  Scenario eff = apply_multiplier(sc, SensitivityParameter::VaccineEffectiveness, 1.2,
                                  EffectivenessReading::Effectiveness);
  // effectiveness 0.96 -> vaccinated rate 0.04 of the base rate
  CHECK(eff.epidemic.beta_vax[0][1] == doctest::Approx(0.04 * beta));

  Scenario ratio = apply_multiplier(sc, SensitivityParameter::VaccineEffectiveness, 1.2,
                                    EffectivenessReading::Ratio);
  CHECK(ratio.epidemic.beta_vax[0][1] == doctest::Approx(0.24 * beta));

  Scenario weaker = apply_multiplier(sc, SensitivityParameter::VaccineEffectiveness, 0.8,
                                     EffectivenessReading::Effectiveness);
  CHECK(weaker.epidemic.beta_vax[0][1] == doctest::Approx(0.36 * beta));
}

TEST_CASE("the baseline row reports zero percent change by construction") {
  Scenario sc = generate_synthetic(33, tiny_preset());
  std::vector<SensitivityRow> rows =
      run_sensitivity(sc, SensitivityParameter::Supply, {0.9, 1.0, 1.1});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].multiplier == 1.0);
  CHECK(rows[1].infections_change_pct == doctest::Approx(0.0));
  CHECK(rows[1].vaccinations_change_pct == doctest::Approx(0.0));
  for (const auto& r : rows) CHECK_FALSE(r.failed);
}

TEST_CASE("identical multipliers reproduce identical rows") {
  Scenario sc = generate_synthetic(34, tiny_preset());
  auto a = run_sensitivity(sc, SensitivityParameter::Demand, {0.8});
  auto b = run_sensitivity(sc, SensitivityParameter::Demand, {0.8});
  CHECK(a[0].infections == b[0].infections);
  CHECK(a[0].vaccinations == b[0].vaccinations);
}

TEST_CASE("a configured reference shifts the infection percent change") {
  Scenario sc = generate_synthetic(35, tiny_preset());
  SensitivityOptions opt;
  opt.reference_infections = 1000.0;
  auto rows = run_sensitivity(sc, SensitivityParameter::Supply, {1.0}, opt);
  CHECK(rows[0].infections_change_pct ==
        doctest::Approx((rows[0].infections - 1000.0) / 1000.0 * 100.0));
}
