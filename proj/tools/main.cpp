// Command-line front end: scenario generation, calibration, optimization,
// simulation, forecasting, validation and sensitivity analysis.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "epivax/calibration.hpp"
#include "epivax/epidemic.hpp"
#include "epivax/io.hpp"
#include "epivax/optimizer.hpp"
#include "epivax/oracle.hpp"
#include "epivax/report.hpp"
#include "epivax/sensitivity.hpp"
#include "epivax/stats.hpp"
#include "epivax/synthetic.hpp"

namespace fs = std::filesystem;
using namespace epivax;

namespace {

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::istringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

void apply_weight_override(Scenario& sc, const std::string& csv) {
  // lambda0,lambda_a,lambda_b,lambda_reg; the middle pair feeds both the
  // fairness and priority variants.
  std::vector<double> w = parse_list(csv);
  if (w.size() != 4) fail("usage", "--weights expects four comma-separated values");
  sc.weights.lambda0 = w[0];
  sc.weights.lambda11 = w[1];
  sc.weights.lambda21 = w[1];
  sc.weights.lambda12 = w[2];
  sc.weights.lambda22 = w[2];
  sc.weights.lambda_reg = w[3];
}

int cmd_gen(const std::string& out_path, std::uint64_t seed, const std::string& sizes_csv,
            double supply_factor, double budget_factor) {
  SyntheticSpec spec = tiny_preset();
  if (!sizes_csv.empty()) {
    std::vector<double> s = parse_list(sizes_csv);
    if (s.size() != 5) fail("usage", "--sizes expects J,K,L,M,T");
    spec.regions = int(s[0]);
    spec.subregions_per_region = int(s[1]);
    spec.pharmacies_per_subregion = int(s[2]);
    spec.suppliers = int(s[3]);
    spec.periods = int(s[4]);
  }
  if (supply_factor > 0) spec.supply_factor = supply_factor;
  if (budget_factor > 0) spec.budget_factor = budget_factor;
  Scenario sc = generate_synthetic(seed, spec);
  write_scenario(sc, out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_optimize(const std::string& scenario_path, const std::string& method,
                 const std::string& weights_csv, const std::string& out_dir, double oracle_step) {
  Scenario sc = parse_scenario(scenario_path);
  if (!weights_csv.empty()) apply_weight_override(sc, weights_csv);
  fs::create_directories(out_dir);

  if (method == "knapsack") {
    DecompositionResult res = run_knapsack_decomposition(sc);
    write_bundle(sc, res, out_dir);
  } else if (method == "gini") {
    GiniDecompositionResult res = run_gini_decomposition(sc);
    write_bundle(sc, res, out_dir);
    std::ostringstream os;
    os << "optimality_residual\t" << format_double(res.optimality_residual) << '\n'
       << "residual_within_one_dose\t" << (res.residual_within_one_dose ? 1 : 0) << '\n';
    std::ofstream extra(fs::path(out_dir) / "gini_residual.txt", std::ios::binary);
    extra << os.str();
  } else if (method == "oracle") {
    GridSpec grid;
    if (oracle_step > 0) grid.step = oracle_step;
    OracleResult oracle = enumerate_optimum(sc, grid, ObjectiveKind::Knapsack);
    DecompositionResult res;
    res.plan = oracle.plan;
    res.trajectory = oracle.trajectory;
    res.objectives = oracle.objectives;
    res.ledger = compute_cost(sc, res.plan);
    res.equity = plan_equity_report(sc, res.plan);
    res.diagnostics.final_cost = res.ledger.total;
    res.diagnostics.alpha_history.assign(sc.horizon + 1, 0);
    res.diagnostics.cost_increments = res.ledger.period_total;
    res.diagnostics.cumulative_cost = res.ledger.cumulative;
    res.diagnostics.unit_cost = zeros(sc.num_regions(), sc.horizon + 1);
    write_bundle(sc, res, out_dir);
    std::ofstream extra(fs::path(out_dir) / "oracle.txt", std::ios::binary);
    extra << "visited\t" << oracle.visited << "\npredicted\t" << oracle.predicted << "\nstep\t"
          << format_double(oracle.step) << "\nslack\t" << format_double(oracle.slack) << "\n";
  } else {
    fail("usage", "unknown method '" + method + "'");
  }
  std::cout << "bundle written to " << out_dir << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir) {
  Scenario sc = parse_scenario(scenario_path);
  AllocationPlan plan = AllocationPlan::zeros(sc);
  DecompositionResult res;
  res.plan = std::move(plan);
  res.trajectory = simulate(sc, res.plan);
  res.ledger = compute_cost(sc, res.plan);
  res.objectives = evaluate_objectives(sc, res.plan, res.trajectory);
  res.equity = plan_equity_report(sc, res.plan);
  res.diagnostics.alpha_history.assign(sc.horizon + 1, 0);
  res.diagnostics.cost_increments.assign(sc.horizon + 1, 0.0);
  res.diagnostics.cumulative_cost.assign(sc.horizon + 1, 0.0);
  res.diagnostics.unit_cost = zeros(sc.num_regions(), sc.horizon + 1);
  fs::create_directories(out_dir);
  write_bundle(sc, res, out_dir);
  std::cout << "uncontrolled trajectory written to " << out_dir << "\n";
  return 0;
}

int cmd_calibrate(const std::string& timeseries_path, const std::string& out_dir,
                  double underreporting, double reduction, bool interpolate) {
  ObservedSeries obs = parse_timeseries(timeseries_path);
  obs.underreporting_rate = underreporting;
  EpidemicParams params;  // calibrated defaults
  CalibrationOptions opt;
  opt.reduction = reduction;
  opt.interpolate_gaps = interpolate;
  CalibratedRates rates = calibrate_effective_rates(obs, params, opt);
  fs::create_directories(out_dir);
  write_rates(rates, fs::path(out_dir) / "rates.tsv");
  std::cout << "rates written to " << out_dir << "/rates.tsv\n";
  if (!rates.notes.empty()) {
    std::cout << rates.notes.size() << " flagged entries\n";
    return 0;
  }
  return 0;
}

int cmd_forecast(const std::string& rates_path, int region, int horizon, int m_max, double level,
                 const std::string& out_dir) {
  Matrix beta = parse_rates_beta(rates_path);
  if (region < 0 || region >= int(beta.size())) fail("usage", "region out of range");
  SarimaFit fit = select_by_aic(beta[region], m_max);
  Forecast fc = forecast_interval(fit, horizon, level);
  fs::create_directories(out_dir);
  write_forecast_table(fc, fs::path(out_dir) / "forecast.tsv");
  std::cout << "selected order " << fit.order.label() << " aic " << format_double(fit.aic)
            << "; forecast written to " << out_dir << "/forecast.tsv\n";
  return 0;
}

int cmd_validate(const std::string& scenario_path, const std::string& timeseries_path,
                 const std::string& out_dir) {
  // Replay the observed dosing through the simulator and compare the
  // model's incidence with the reported cases, pairwise per period.
  Scenario sc = parse_scenario(scenario_path);
  ObservedSeries obs = parse_timeseries(timeseries_path);
  if (obs.num_regions != sc.num_regions())
    fail("series-shape", "time series regions do not match the scenario");
  AllocationPlan plan = AllocationPlan::zeros(sc);
  for (int j = 0; j < sc.num_regions(); ++j)
    for (int t = 0; t <= sc.horizon && t < obs.num_periods; ++t)
      plan.psi[j][t] = obs.doses_administered[j][t];
  Trajectory traj = simulate(sc, plan);

  ValidationReport rep;
  int P = std::min(obs.num_periods, sc.horizon + 1);
  std::vector<double> model_nat(P, 0.0), actual_nat(P, 0.0);
  rep.per_region.resize(sc.num_regions());
  for (int j = 0; j < sc.num_regions(); ++j) {
    std::vector<double> model(P), actual(P);
    for (int t = 0; t < P; ++t) {
      model[t] = traj.new_infections[j][t];
      actual[t] = obs.reported_cases[j][t];
      model_nat[t] += model[t];
      actual_nat[t] += actual[t];
      rep.model_total += model[t];
      rep.actual_total += actual[t];
    }
    rep.per_region[j] = paired_t_test(model, actual);
  }
  rep.national = paired_t_test(model_nat, actual_nat);
  fs::create_directories(out_dir);
  write_validation_report(rep, fs::path(out_dir) / "validation.tsv");
  std::cout << "national p-value " << format_double(rep.national.p_value) << "; report in "
            << out_dir << "/validation.tsv\n";
  return 0;
}

int cmd_sensitivity(const std::string& scenario_path, const std::string& parameter,
                    const std::string& multipliers_csv, const std::string& out_dir,
                    const std::string& reading) {
  Scenario sc = parse_scenario(scenario_path);
  auto p = sensitivity_parameter_from(parameter);
  if (!p) fail("usage", "unknown parameter '" + parameter + "'");
  SensitivityOptions opt;
  if (reading == "ratio") opt.reading = EffectivenessReading::Ratio;
  else if (reading != "effectiveness") fail("usage", "--beta1-mode must be effectiveness|ratio");
  std::vector<double> multipliers = parse_list(multipliers_csv);
  std::vector<SensitivityRow> rows = run_sensitivity(sc, *p, multipliers, opt);
  fs::create_directories(out_dir);
  write_sensitivity_table(rows, fs::path(out_dir) / "sensitivity.tsv");
  std::cout << "sensitivity table written to " << out_dir << "/sensitivity.tsv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epidemic-aware vaccine supply chain planner"};
  app.require_subcommand(1);

  std::string scenario_path, timeseries_path, out_dir = "out", method = "knapsack";
  std::string weights_csv, sizes_csv, multipliers_csv = "0.8,1.0,1.2", parameter = "supply";
  std::string rates_path, beta1_mode = "effectiveness";
  std::uint64_t seed = 1;
  double oracle_step = 0.0, underreporting = 0.5, reduction = 0.2, level = 0.95;
  double supply_factor = 0.0, budget_factor = 0.0;
  int region = 0, horizon = 6, m_max = 8;
  bool interpolate = false;

  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic scenario");
  gen->add_option("--seed", seed);
  gen->add_option("--sizes", sizes_csv, "J,K,L,M,T");
  gen->add_option("--supply-factor", supply_factor);
  gen->add_option("--budget-factor", budget_factor);
  gen->add_option("--out", out_dir)->required();

  CLI::App* opt = app.add_subcommand("optimize", "Run an allocation method");
  opt->add_option("--scenario", scenario_path)->required();
  opt->add_option("--method", method)->check(CLI::IsMember({"knapsack", "gini", "oracle"}));
  opt->add_option("--weights", weights_csv, "lambda0,lambda_a,lambda_b,lambda_reg");
  opt->add_option("--step", oracle_step, "oracle grid step in doses");
  opt->add_option("--out", out_dir);

  CLI::App* sim = app.add_subcommand("simulate", "Propagate the uncontrolled epidemic");
  sim->add_option("--scenario", scenario_path)->required();
  sim->add_option("--out", out_dir);

  CLI::App* cal = app.add_subcommand("calibrate", "Recover infection rates from a time series");
  cal->add_option("--timeseries", timeseries_path)->required();
  cal->add_option("--underreporting", underreporting);
  cal->add_option("--reduction", reduction);
  cal->add_flag("--interpolate", interpolate);
  cal->add_option("--out", out_dir);

  CLI::App* fc = app.add_subcommand("forecast", "Fit and forecast a rate series");
  fc->add_option("--rates", rates_path)->required();
  fc->add_option("--region", region);
  fc->add_option("--horizon", horizon);
  fc->add_option("--m-max", m_max);
  fc->add_option("--level", level);
  fc->add_option("--out", out_dir);

  CLI::App* val = app.add_subcommand("validate", "Replay observed dosing and compare incidence");
  val->add_option("--scenario", scenario_path)->required();
  val->add_option("--timeseries", timeseries_path)->required();
  val->add_option("--out", out_dir);

  CLI::App* sens = app.add_subcommand("sensitivity", "One-at-a-time parameter study");
  sens->add_option("--scenario", scenario_path)->required();
  sens->add_option("--parameter", parameter);
  sens->add_option("--multipliers", multipliers_csv);
  sens->add_option("--beta1-mode", beta1_mode);
  sens->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(out_dir, seed, sizes_csv, supply_factor, budget_factor);
    if (opt->parsed()) return cmd_optimize(scenario_path, method, weights_csv, out_dir, oracle_step);
    if (sim->parsed()) return cmd_simulate(scenario_path, out_dir);
    if (cal->parsed())
      return cmd_calibrate(timeseries_path, out_dir, underreporting, reduction, interpolate);
    if (fc->parsed()) return cmd_forecast(rates_path, region, horizon, m_max, level, out_dir);
    if (val->parsed()) return cmd_validate(scenario_path, timeseries_path, out_dir);
    if (sens->parsed())
      return cmd_sensitivity(scenario_path, parameter, multipliers_csv, out_dir, beta1_mode);
  } catch (const Error& e) {
    std::string code = e.code();
    std::cerr << "error: " << e.what() << "\n";
    return code == "usage" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
