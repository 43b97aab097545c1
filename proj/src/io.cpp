#include "epivax/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "epivax/equity.hpp"

namespace epivax {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("io-open", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io-open", "cannot write " + path.string());
  out << text;
  if (!out) fail("io-write", "failed writing " + path.string());
}

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  fail("scenario-schema", where + ": " + what);
}

Matrix get_matrix(const json& j, const std::string& field, std::size_t rows, std::size_t cols) {
  if (!j.contains(field)) schema_error(field, "missing");
  const json& m = j.at(field);
  if (!m.is_array() || m.size() != rows) schema_error(field, "expected " + std::to_string(rows) + " rows");
  Matrix out(rows, std::vector<double>(cols, 0.0));
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = m.at(r);
    if (!row.is_array() || row.size() != cols)
      schema_error(field, "row " + std::to_string(r) + " expected " + std::to_string(cols) + " values");
    for (std::size_t c = 0; c < cols; ++c) out[r][c] = row.at(c).get<double>();
  }
  return out;
}

std::vector<double> get_vector(const json& j, const std::string& field, std::size_t n) {
  if (!j.contains(field)) schema_error(field, "missing");
  const json& v = j.at(field);
  if (!v.is_array() || v.size() != n) schema_error(field, "expected " + std::to_string(n) + " values");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v.at(i).get<double>();
  return out;
}

std::vector<std::vector<int>> get_groups(const json& j, const std::string& field, std::size_t n) {
  if (!j.contains(field)) schema_error(field, "missing");
  const json& v = j.at(field);
  if (!v.is_array() || v.size() != n) schema_error(field, "expected " + std::to_string(n) + " groups");
  std::vector<std::vector<int>> out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const json& e : v.at(i)) out[i].push_back(e.get<int>());
  return out;
}

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<const char*> known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) schema_error(where, "unknown field '" + it.key() + "'");
  }
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (const auto& row : m) out.push_back(row);
  return out;
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  json j = json::parse(text);
  reject_unknown(j, "scenario",
                 {"horizon", "period_length_days", "suppliers", "regions", "subregions_of",
                  "pharmacies_of", "centers_of", "epidemic", "supply", "costs", "weights", "svi",
                  "access"});

  Scenario sc;
  sc.horizon = j.at("horizon").get<int>();
  sc.period_length_days = j.value("period_length_days", 14);
  if (sc.horizon < 1) schema_error("horizon", "must be at least 1");
  const std::size_t T1 = std::size_t(sc.horizon) + 1;

  for (const json& e : j.at("suppliers")) sc.suppliers.push_back(e.get<int>());
  for (const json& e : j.at("regions")) sc.regions.push_back(e.get<int>());
  const std::size_t M = sc.suppliers.size(), J = sc.regions.size();
  for (std::size_t i = 0; i < M; ++i)
    if (sc.suppliers[i] != int(i)) schema_error("suppliers", "ids must be 0..M-1 in order");
  for (std::size_t i = 0; i < J; ++i)
    if (sc.regions[i] != int(i)) schema_error("regions", "ids must be 0..J-1 in order");

  sc.subregions_of = get_groups(j, "subregions_of", J);
  std::size_t K = 0;
  for (const auto& g : sc.subregions_of) K += g.size();
  sc.pharmacies_of = get_groups(j, "pharmacies_of", K);
  std::size_t L = 0;
  for (const auto& g : sc.pharmacies_of) L += g.size();
  sc.centers_of = get_groups(j, "centers_of", J);
  std::size_t O = 0;
  for (const auto& g : sc.centers_of) O += g.size();

  const json& ep = j.at("epidemic");
  reject_unknown(ep, "epidemic",
                 {"mu", "gamma", "gamma1", "psi", "sigma", "t_r", "beta", "beta_vax", "pop",
                  "init_I", "init_Itilde", "init_R"});
  EpidemicParams& e = sc.epidemic;
  e.mu = ep.value("mu", 14.0 / (75.0 * 365.0));
  e.gamma = ep.value("gamma", 1.0);
  e.gamma1 = ep.value("gamma1", 1.0);
  e.psi = ep.value("psi", 0);
  e.t_r = ep.value("t_r", 2);
  e.sigma = ep.contains("sigma") ? get_vector(ep, "sigma", T1) : std::vector<double>(T1, 0.0);
  e.beta = get_matrix(ep, "beta", J, T1);
  e.beta_vax = get_matrix(ep, "beta_vax", J, T1);
  const json& pop = ep.at("pop");
  reject_unknown(pop, "epidemic.pop", {"region", "subregion"});
  e.pop_region = get_vector(pop, "region", J);
  e.pop_subregion = get_vector(pop, "subregion", K);
  e.init_i = get_vector(ep, "init_I", J);
  e.init_itilde = ep.contains("init_Itilde") ? get_vector(ep, "init_Itilde", J)
                                             : std::vector<double>(J, 0.0);
  e.init_r = ep.contains("init_R") ? get_vector(ep, "init_R", J) : std::vector<double>(J, 0.0);

  const json& sp = j.at("supply");
  reject_unknown(sp, "supply",
                 {"supplier_capacity", "local_capacity", "center_capacity", "lead_center",
                  "lead_1", "lead_2", "lead_3", "wastage", "demand"});
  SupplyParams& s = sc.supply;
  s.supplier_capacity = get_matrix(sp, "supplier_capacity", M, T1);
  s.local_capacity = get_matrix(sp, "local_capacity", K, T1);
  if (O > 0 && sp.contains("center_capacity")) s.center_capacity = get_matrix(sp, "center_capacity", O, T1);
  else s.center_capacity = Matrix(O, std::vector<double>(T1, 10000.0));
  s.lead_center = sp.value("lead_center", 1);
  if (sp.contains("lead_1")) {
    Matrix l1 = get_matrix(sp, "lead_1", M, J);
    s.lead_1.assign(M, std::vector<int>(J, 0));
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t r = 0; r < J; ++r) s.lead_1[i][r] = int(l1[i][r]);
  } else {
    s.lead_1.assign(M, std::vector<int>(J, 0));
  }
  auto int_vector = [&](const char* field, std::size_t n) {
    std::vector<int> out(n, 0);
    if (sp.contains(field)) {
      std::vector<double> v = get_vector(sp, field, n);
      for (std::size_t i = 0; i < n; ++i) out[i] = int(v[i]);
    }
    return out;
  };
  s.lead_2 = int_vector("lead_2", K);
  s.lead_3 = int_vector("lead_3", L);
  s.wastage = sp.value("wastage", 0.0);
  s.demand = get_matrix(sp, "demand", J, T1);

  const json& co = j.at("costs");
  reject_unknown(co, "costs",
                 {"budget", "dose_cost", "transport_1", "transport_2", "transport_3", "holding_1",
                  "holding_2", "holding_3", "open_cost", "admin_cost"});
  CostParams& c = sc.costs;
  c.budget = co.at("budget").get<double>();
  c.dose_cost = get_matrix(co, "dose_cost", M, T1);
  c.transport_1 = get_matrix(co, "transport_1", M, J);
  c.transport_2 = get_vector(co, "transport_2", K);
  c.transport_3 = get_vector(co, "transport_3", L);
  c.holding_1 = get_vector(co, "holding_1", J);
  c.holding_2 = get_vector(co, "holding_2", K);
  c.holding_3 = get_vector(co, "holding_3", L);
  c.open_cost = O > 0 ? get_vector(co, "open_cost", O) : std::vector<double>{};
  c.admin_cost = get_matrix(co, "admin_cost", J, T1);

  if (j.contains("weights")) {
    const json& w = j.at("weights");
    reject_unknown(w, "weights",
                   {"lambda0", "lambda11", "lambda12", "lambda21", "lambda22", "lambda_reg",
                    "normalized"});
    sc.weights.lambda0 = w.value("lambda0", -1.0);
    sc.weights.lambda11 = w.value("lambda11", 1.0);
    sc.weights.lambda12 = w.value("lambda12", 1.0);
    sc.weights.lambda21 = w.value("lambda21", 1.0);
    sc.weights.lambda22 = w.value("lambda22", 1.0);
    sc.weights.lambda_reg = w.value("lambda_reg", 10.0);
    sc.weights.normalized = w.value("normalized", false);
  }

  sc.svi = get_vector(j, "svi", K);
  sc.access = get_vector(j, "access", J);

  sc.finalize();
  FeasibilityReport rep = validate_scenario(sc);
  if (!rep.feasible) fail("invalid-scenario", rep.to_string());
  return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  return parse_scenario_text(read_file(path));
}

std::string scenario_to_text(const Scenario& sc) {
  json j;
  j["horizon"] = sc.horizon;
  j["period_length_days"] = sc.period_length_days;
  j["suppliers"] = sc.suppliers;
  j["regions"] = sc.regions;
  j["subregions_of"] = sc.subregions_of;
  j["pharmacies_of"] = sc.pharmacies_of;
  j["centers_of"] = sc.centers_of;

  json ep;
  ep["mu"] = sc.epidemic.mu;
  ep["gamma"] = sc.epidemic.gamma;
  ep["gamma1"] = sc.epidemic.gamma1;
  ep["psi"] = sc.epidemic.psi;
  ep["sigma"] = sc.epidemic.sigma;
  ep["t_r"] = sc.epidemic.t_r;
  ep["beta"] = matrix_to_json(sc.epidemic.beta);
  ep["beta_vax"] = matrix_to_json(sc.epidemic.beta_vax);
  ep["pop"] = {{"region", sc.epidemic.pop_region}, {"subregion", sc.epidemic.pop_subregion}};
  ep["init_I"] = sc.epidemic.init_i;
  ep["init_Itilde"] = sc.epidemic.init_itilde;
  ep["init_R"] = sc.epidemic.init_r;
  j["epidemic"] = std::move(ep);

  json sp;
  sp["supplier_capacity"] = matrix_to_json(sc.supply.supplier_capacity);
  sp["local_capacity"] = matrix_to_json(sc.supply.local_capacity);
  sp["center_capacity"] = matrix_to_json(sc.supply.center_capacity);
  sp["lead_center"] = sc.supply.lead_center;
  sp["lead_1"] = sc.supply.lead_1;
  sp["lead_2"] = sc.supply.lead_2;
  sp["lead_3"] = sc.supply.lead_3;
  sp["wastage"] = sc.supply.wastage;
  sp["demand"] = matrix_to_json(sc.supply.demand);
  j["supply"] = std::move(sp);

  json co;
  co["budget"] = sc.costs.budget;
  co["dose_cost"] = matrix_to_json(sc.costs.dose_cost);
  co["transport_1"] = matrix_to_json(sc.costs.transport_1);
  co["transport_2"] = sc.costs.transport_2;
  co["transport_3"] = sc.costs.transport_3;
  co["holding_1"] = sc.costs.holding_1;
  co["holding_2"] = sc.costs.holding_2;
  co["holding_3"] = sc.costs.holding_3;
  co["open_cost"] = sc.costs.open_cost;
  co["admin_cost"] = matrix_to_json(sc.costs.admin_cost);
  j["costs"] = std::move(co);

  json w;
  w["lambda0"] = sc.weights.lambda0;
  w["lambda11"] = sc.weights.lambda11;
  w["lambda12"] = sc.weights.lambda12;
  w["lambda21"] = sc.weights.lambda21;
  w["lambda22"] = sc.weights.lambda22;
  w["lambda_reg"] = sc.weights.lambda_reg;
  w["normalized"] = sc.weights.normalized;
  j["weights"] = std::move(w);

  j["svi"] = sc.svi;
  j["access"] = sc.access;
  return j.dump(1);
}

void write_scenario(const Scenario& sc, const std::filesystem::path& path) {
  write_file(path, scenario_to_text(sc));
}

ObservedSeries parse_timeseries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("io-open", "cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) fail("timeseries-empty", "no records in " + path.string());
  if (header != "region_id\tperiod\tcases\tdoses\tpopulation")
    fail("timeseries-schema", "unexpected header: " + header);

  struct Rec { double cases, doses, pop; };
  std::map<std::pair<int, int>, Rec> records;
  int max_region = -1, max_period = -1;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f;
    std::vector<std::string> fields;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() != 5) fail("timeseries-schema", "line " + std::to_string(lineno) + " malformed");
    int region = std::stoi(fields[0]);
    int period = std::stoi(fields[1]);
    double cases = std::stod(fields[2]);
    double doses = std::stod(fields[3]);
    double pop = std::stod(fields[4]);
    auto key = std::make_pair(region, period);
    if (records.count(key))
      fail("timeseries-duplicate", "duplicate record for region " + fields[0] + " period " + fields[1]);
    records[key] = {cases, doses, pop};
    max_region = std::max(max_region, region);
    max_period = std::max(max_period, period);
  }
  if (records.empty()) fail("timeseries-empty", "no records in " + path.string());

  ObservedSeries obs;
  obs.num_regions = max_region + 1;
  obs.num_periods = max_period + 1;
  obs.reported_cases = zeros(obs.num_regions, obs.num_periods);
  obs.doses_administered = zeros(obs.num_regions, obs.num_periods);
  obs.population.assign(obs.num_regions, 0.0);
  for (int j = 0; j < obs.num_regions; ++j) {
    int prev = -1;
    for (int t = 0; t < obs.num_periods; ++t) {
      auto it = records.find({j, t});
      if (it == records.end()) {
        obs.gaps.emplace_back(j, t);
        continue;
      }
      if (t <= prev) fail("timeseries-order", "non-monotone period in region " + std::to_string(j));
      prev = t;
      obs.reported_cases[j][t] = it->second.cases;
      obs.doses_administered[j][t] = it->second.doses;
      obs.population[j] = it->second.pop;
    }
  }
  return obs;
}

void write_timeseries(const ObservedSeries& obs, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "region_id\tperiod\tcases\tdoses\tpopulation\n";
  for (int j = 0; j < obs.num_regions; ++j)
    for (int t = 0; t < obs.num_periods; ++t)
      os << j << '\t' << t << '\t' << format_double(obs.reported_cases[j][t]) << '\t'
         << format_double(obs.doses_administered[j][t]) << '\t'
         << format_double(obs.population[j]) << '\n';
  write_file(path, os.str());
}

namespace {

void write_plan_tsv(const Scenario& sc, const AllocationPlan& plan,
                    const std::filesystem::path& path) {
  std::ostringstream os;
  os << "variable\tsupplier\tregion\tsubregion\tpharmacy\tcenter\tperiod\tvalue\n";
  const int T = sc.horizon;
  auto row = [&](const char* var, int i, int j, int k, int l, int o, int t, double v) {
    if (v == 0.0) return;  // sparse representation; zeros are implied
    os << var << '\t' << i << '\t' << j << '\t' << k << '\t' << l << '\t' << o << '\t' << t << '\t'
       << format_double(v) << '\n';
  };
  for (int j = 0; j < sc.num_regions(); ++j)
    for (int t = 0; t <= T; ++t) {
      row("psi", -1, j, -1, -1, -1, t, plan.psi[j][t]);
      row("xi", -1, j, -1, -1, -1, t, plan.xi[j][t]);
      row("w1", -1, j, -1, -1, -1, t, plan.w1[j][t]);
      row("nu", -1, j, -1, -1, -1, t, plan.nu[j][t]);
      row("trig_i", -1, j, -1, -1, -1, t, plan.trig_i[j][t]);
      row("trig_d", -1, j, -1, -1, -1, t, plan.trig_d[j][t]);
    }
  for (int k = 0; k < sc.num_subregions(); ++k)
    for (int t = 0; t <= T; ++t) {
      int j = sc.region_of_sub[k];
      row("phi", -1, j, k, -1, -1, t, plan.phi[k][t]);
      row("omega", -1, j, k, -1, -1, t, plan.omega[k][t]);
      row("g2", -1, j, k, -1, -1, t, plan.g2[k][t]);
      row("w2", -1, j, k, -1, -1, t, plan.w2[k][t]);
    }
  for (int l = 0; l < sc.num_pharmacies(); ++l)
    for (int t = 0; t <= T; ++t) {
      int k = sc.sub_of_pharmacy[l];
      row("g3", -1, sc.region_of_sub[k], k, l, -1, t, plan.g3[l][t]);
      row("w3", -1, sc.region_of_sub[k], k, l, -1, t, plan.w3[l][t]);
    }
  for (int i = 0; i < sc.num_suppliers(); ++i)
    for (int j = 0; j < sc.num_regions(); ++j)
      for (int t = 0; t <= T; ++t) row("g1", i, j, -1, -1, -1, t, plan.g1[i][j][t]);
  for (int o = 0; o < sc.num_centers(); ++o)
    for (int t = 0; t <= T; ++t)
      row("x", -1, sc.region_of_center[o], -1, -1, o, t, plan.x[o][t]);
  for (int t = 0; t <= T; ++t) row("zeta", -1, -1, -1, -1, -1, t, plan.zeta[t]);
  write_file(path, os.str());
}

void write_trajectory_tsv(const Scenario& sc, const Trajectory& traj,
                          const std::filesystem::path& path) {
  std::ostringstream os;
  os << "region\tperiod\tS\tV\tI\tR\tItilde\ttau\tnew_infections\n";
  for (int j = 0; j < sc.num_regions(); ++j)
    for (int t = 0; t <= sc.horizon; ++t) {
      const EpidemicState& st = traj.states[t];
      os << j << '\t' << t << '\t' << format_double(st.s[j]) << '\t' << format_double(st.v[j])
         << '\t' << format_double(st.i[j]) << '\t' << format_double(st.r[j]) << '\t'
         << format_double(st.itilde[j]) << '\t' << format_double(traj.tau[j][t]) << '\t'
         << format_double(traj.new_infections[j][t]) << '\n';
    }
  write_file(path, os.str());
}

void write_ledger_tsv(const CostLedger& ledger, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "period\tadministration\tpurchase\ttransport_1\ttransport_2\ttransport_3\tholding_1\t"
        "holding_2\tholding_3\topening\tperiod_total\tcumulative\n";
  for (std::size_t t = 0; t < ledger.period_total.size(); ++t)
    os << t << '\t' << format_double(ledger.administration[t]) << '\t'
       << format_double(ledger.purchase[t]) << '\t' << format_double(ledger.transport_1[t]) << '\t'
       << format_double(ledger.transport_2[t]) << '\t' << format_double(ledger.transport_3[t])
       << '\t' << format_double(ledger.holding_1[t]) << '\t' << format_double(ledger.holding_2[t])
       << '\t' << format_double(ledger.holding_3[t]) << '\t' << format_double(ledger.opening[t])
       << '\t' << format_double(ledger.period_total[t]) << '\t'
       << format_double(ledger.cumulative[t]) << '\n';
  write_file(path, os.str());
}

void write_equity_tsv(const Scenario& sc, const GiniReport& eq,
                      const std::filesystem::path& path) {
  std::ostringstream os;
  os << "record\tregion\tsubregion\tperiod\tvalue\n";
  for (int j = 0; j < sc.num_regions(); ++j)
    os << "gini\t" << j << "\t-1\t-1\t" << format_double(eq.region_gini[j]) << '\n';
  os << "eta\t-1\t-1\t-1\t" << format_double(eq.max_gini) << '\n';
  for (int k = 0; k < sc.num_subregions(); ++k)
    os << "per_capita\t" << sc.region_of_sub[k] << '\t' << k << "\t-1\t"
       << format_double(eq.per_capita[k]) << '\n';
  for (std::size_t t = 0; t < eq.zeta.size(); ++t)
    os << "zeta\t-1\t-1\t" << t << '\t' << format_double(eq.zeta[t]) << '\n';
  write_file(path, os.str());
}

}  // namespace

void write_bundle(const Scenario& sc, const DecompositionResult& res,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_plan_tsv(sc, res.plan, dir / "plan.tsv");
  write_trajectory_tsv(sc, res.trajectory, dir / "trajectory.tsv");
  write_ledger_tsv(res.ledger, dir / "ledger.tsv");
  write_equity_tsv(sc, res.equity, dir / "equity.tsv");

  {
    std::ostringstream os;
    const DecompositionDiagnostics& d = res.diagnostics;
    os << "termination\t" << to_string(d.termination) << '\n';
    os << "backtracks\t" << d.backtracks << '\n';
    os << "final_cost\t" << format_double(d.final_cost) << '\n';
    os << "alpha_history";
    for (std::size_t t = 1; t < d.alpha_history.size(); ++t) os << '\t' << d.alpha_history[t];
    os << '\n';
    os << "cost_increments";
    for (std::size_t t = 1; t < d.cost_increments.size(); ++t)
      os << '\t' << format_double(d.cost_increments[t]);
    os << '\n';
    if (d.gap_scalarized) os << "gap_scalarized\t" << format_double(*d.gap_scalarized) << '\n';
    if (d.gap_infection) os << "gap_infection\t" << format_double(*d.gap_infection) << '\n';
    os << "unit_cost_estimates\n";
    for (int j = 0; j < sc.num_regions(); ++j) {
      os << j;
      for (int t = 1; t <= sc.horizon; ++t) os << '\t' << format_double(d.unit_cost[j][t]);
      os << '\n';
    }
    write_file(dir / "diagnostics.txt", os.str());
  }
  {
    std::ostringstream os;
    os << "infection_flux_total\t" << format_double(res.objectives.infection_flux_total) << '\n';
    os << "min_percapita_sum\t" << format_double(res.objectives.min_percapita_sum) << '\n';
    os << "gini_max\t" << format_double(res.objectives.gini_max) << '\n';
    os << "knapsack_value\t" << format_double(res.objectives.knapsack_value) << '\n';
    os << "scalarized\t" << format_double(res.objectives.scalarized) << '\n';
    os << "total_cost\t" << format_double(res.ledger.total) << '\n';
    os << "budget\t" << format_double(res.ledger.budget) << '\n';
    os << "budget_slack\t" << format_double(res.ledger.slack) << '\n';
    os << "termination\t" << to_string(res.diagnostics.termination) << '\n';
    double doses = 0.0;
    for (const auto& roww : res.plan.psi)
      for (double v : roww) doses += v;
    for (const auto& roww : res.plan.xi)
      for (double v : roww) doses += v;
    os << "doses_administered\t" << format_double(doses) << '\n';
    int openings = 0;
    for (const auto& xr : res.plan.x)
      for (std::size_t t = 0; t < xr.size(); ++t)
        if (xr[t] && (t == 0 || !xr[t - 1])) ++openings;
    os << "centers_opened\t" << openings << '\n';
    write_file(dir / "summary.txt", os.str());
  }
}

void write_rates(const CalibratedRates& rates, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "region\tperiod\tbeta\tbeta_vax\tr_effective\tmissing\n";
  for (std::size_t j = 0; j < rates.beta.size(); ++j)
    for (std::size_t t = 0; t < rates.beta[j].size(); ++t)
      os << j << '\t' << t << '\t' << format_double(rates.beta[j][t]) << '\t'
         << format_double(rates.beta_vax[j][t]) << '\t' << format_double(rates.r_effective[j][t])
         << '\t' << (rates.missing[j][t] ? 1 : 0) << '\n';
  write_file(path, os.str());
}

Matrix parse_rates_beta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("io-open", "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::map<std::pair<int, int>, double> vals;
  int max_j = -1, max_t = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f;
    std::vector<std::string> fields;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() < 3) fail("rates-schema", "malformed rates line");
    int j = std::stoi(fields[0]), t = std::stoi(fields[1]);
    vals[{j, t}] = std::stod(fields[2]);
    max_j = std::max(max_j, j);
    max_t = std::max(max_t, t);
  }
  Matrix beta = zeros(max_j + 1, max_t + 1);
  for (const auto& [key, v] : vals) beta[key.first][key.second] = v;
  return beta;
}

Matrix parse_tsv_matrix(const std::filesystem::path& path, const std::string& value_column,
                        const std::string& row_column, const std::string& col_column) {
  std::ifstream in(path);
  if (!in) fail("io-open", "cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string f;
    while (std::getline(hs, f, '\t')) cols.push_back(f);
  }
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return int(i);
    fail("tsv-schema", "column '" + name + "' not found in " + path.string());
  };
  int vi = index_of(value_column), ri = index_of(row_column), ci = index_of(col_column);

  std::map<std::pair<int, int>, double> vals;
  int max_r = -1, max_c = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f;
    std::vector<std::string> fields;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    int r = std::stoi(fields[ri]), c = std::stoi(fields[ci]);
    if (r < 0 || c < 0) continue;
    vals[{r, c}] = std::stod(fields[vi]);
    max_r = std::max(max_r, r);
    max_c = std::max(max_c, c);
  }
  Matrix out = zeros(max_r + 1, max_c + 1);
  for (const auto& [key, v] : vals) out[key.first][key.second] = v;
  return out;
}

}  // namespace epivax
