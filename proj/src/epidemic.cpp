#include "epivax/epidemic.hpp"

#include <cmath>

namespace epivax {

RegionState step_unguarded(const StepInputs& in) {
  const double infect_s = in.beta * in.s * in.i;
  const double infect_v = in.beta_vax * in.v * in.i;
  const double immunize = in.psi ? in.gamma1 * in.v : 0.0;

  RegionState out;
  out.s = in.s + in.mu * in.n - in.mu * in.s - infect_s - in.dose_lagged + in.reinfection;
  out.v = in.v - in.mu * in.v + in.dose_lagged - infect_v - immunize;
  out.i = in.i - in.mu * in.i + infect_s + infect_v - in.gamma * in.i;
  out.r = in.r - in.mu * in.r + immunize + in.gamma * in.i - in.dose_recovered;
  return out;
}

StepOutcome step_clamped(const StepInputs& in, double tol) {
  StepOutcome out;
  out.state = step_unguarded(in);
  const double scale_tol = tol * std::max(1.0, in.n);
  // Per-compartment structural floors: how far the no-dose dynamics alone
  // may undershoot when the combined outflow rate exceeds one.
  const double allow_s = std::max(0.0, in.mu + in.beta * in.i - 1.0) * in.s;
  const double allow_v =
      std::max(0.0, in.mu + in.beta_vax * in.i + (in.psi ? in.gamma1 : 0.0) - 1.0) * in.v;
  const double allow_i = std::max(0.0, in.mu + in.gamma - 1.0) * in.i;

  auto guard = [&](double& value, double allowance, const char* name) {
    if (value < -(allowance + scale_tol)) {
      double excess = -(value + allowance);
      if (excess > out.violation) {
        out.violation = excess;
        out.compartment = name;
      }
    }
    if (value < 0.0) value = 0.0;
  };
  guard(out.state.s, allow_s, "susceptible");
  guard(out.state.v, allow_v, "vaccinated");
  guard(out.state.i, allow_i, "infected");
  guard(out.state.r, 0.0, "removed");
  return out;
}

RegionState step(const StepInputs& in, double tol) {
  StepOutcome out = step_clamped(in, tol);
  if (out.compartment)
    fail("state-underflow",
         std::string(out.compartment) + " went negative by " + std::to_string(out.violation));
  return out.state;
}

int dose_lag(const EpidemicParams& p) {
  if (p.gamma1 <= 0.0) fail("bad-parameter", "gamma1 must be positive");
  return int(std::ceil(1.0 / p.gamma1));
}

double infection_flux(const Scenario& sc, const EpidemicState& st, int j, int t) {
  return sc.epidemic.beta[j][t] * st.s[j] * st.i[j] +
         sc.epidemic.beta_vax[j][t] * st.v[j] * st.i[j];
}

double reinfection_inflow(const Trajectory& traj, const Scenario& sc, int j, int t) {
  const int t_r = sc.epidemic.t_r;
  if (t < t_r) return 0.0;
  const EpidemicState& past = traj.states[t - t_r];
  double sigma = t < int(sc.epidemic.sigma.size()) ? sc.epidemic.sigma[t] : 0.0;
  return sigma * (sc.epidemic.beta[j][t - t_r] * past.s[j] +
                  sc.epidemic.beta_vax[j][t - t_r] * past.v[j]) *
         past.i[j];
}

double infection_threshold(const Trajectory& traj, const Scenario& sc, int j, int t) {
  if (t >= 3) {
    double sum = 0.0;
    for (int a = t - 3; a < t; ++a) sum += traj.new_infections[j][a];
    return sum / 3.0;
  }
  const EpidemicState& s0 = traj.states[0];
  return 0.5 * sc.epidemic.beta[j][t] * s0.s[j] * s0.i[j];
}

TriggerPair trigger_indicators(const Trajectory& traj, const Scenario& sc, int j, int t) {
  TriggerPair out;
  if (t < sc.supply.lead_center) return out;
  double flux = traj.new_infections[j][t];
  out.infection = flux > traj.tau[j][t];
  double capacity = 0.0;
  for (int k : sc.subregions_of[j]) capacity += sc.supply.local_capacity[k][t];
  out.demand = capacity < sc.supply.demand[j][t];
  return out;
}

Trajectory simulate(const Scenario& sc, const AllocationPlan& plan) {
  const int J = sc.num_regions();
  const int T = sc.horizon;
  const int lag = dose_lag(sc.epidemic);

  Trajectory traj;
  traj.states.resize(T + 1);
  traj.tau = zeros(J, T + 1);
  traj.new_infections = zeros(J, T + 1);

  EpidemicState init;
  init.s.resize(J);
  init.v.assign(J, 0.0);
  init.i.resize(J);
  init.r.resize(J);
  init.itilde.resize(J);
  for (int j = 0; j < J; ++j) {
    init.i[j] = sc.epidemic.init_i[j];
    init.itilde[j] = sc.epidemic.init_itilde[j];
    init.r[j] = sc.epidemic.init_r[j];
    init.s[j] = sc.epidemic.pop_region[j] - init.i[j] + init.itilde[j];
    if (init.s[j] < 0.0) fail("state-underflow", "initial susceptible negative in region " + std::to_string(j));
  }
  traj.states[0] = init;
  for (int j = 0; j < J; ++j) {
    traj.new_infections[j][0] = infection_flux(sc, init, j, 0);
    traj.tau[j][0] = infection_threshold(traj, sc, j, 0);
  }

  for (int t = 0; t < T; ++t) {
    const EpidemicState& cur = traj.states[t];
    EpidemicState next;
    next.s.resize(J);
    next.v.resize(J);
    next.i.resize(J);
    next.r.resize(J);
    next.itilde.assign(J, 0.0);
    for (int j = 0; j < J; ++j) {
      StepInputs in;
      in.s = cur.s[j];
      in.v = cur.v[j];
      in.i = cur.i[j];
      in.r = cur.r[j];
      in.n = sc.epidemic.pop_region[j];
      in.beta = sc.epidemic.beta[j][t];
      in.beta_vax = sc.epidemic.beta_vax[j][t];
      in.mu = sc.epidemic.mu;
      in.gamma = sc.epidemic.gamma;
      in.gamma1 = sc.epidemic.gamma1;
      in.psi = sc.epidemic.psi;
      in.dose_lagged = (t - lag >= 0) ? plan.psi[j][t - lag] : 0.0;
      in.dose_recovered = plan.xi[j][t];
      // The inflow at t is the stored series value: the given initial at
      // t = 0, the waning-immunity formula afterwards.
      in.reinfection = cur.itilde[j];
      RegionState ns = step(in);
      next.s[j] = ns.s;
      next.v[j] = ns.v;
      next.i[j] = ns.i;
      next.r[j] = ns.r;
    }
    traj.states[t + 1] = next;
    for (int j = 0; j < J; ++j) {
      traj.states[t + 1].itilde[j] = reinfection_inflow(traj, sc, j, t + 1);
      traj.new_infections[j][t + 1] = infection_flux(sc, traj.states[t + 1], j, t + 1);
      traj.tau[j][t + 1] = infection_threshold(traj, sc, j, t + 1);
    }
  }
  return traj;
}

}  // namespace epivax
