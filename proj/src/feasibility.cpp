#include <algorithm>
#include <cmath>

#include "epivax/epidemic.hpp"
#include "epivax/scenario.hpp"

namespace epivax {

namespace {

struct Fam {
  FeasibilityFamily fam;
  double tol;
  explicit Fam(std::string name, double t) : tol(t) { fam.name = std::move(name); }
  // violation is pre-normalized by the caller's scale
  void hit(double violation, int j = -1, int k = -1, int t = -1) {
    if (violation > fam.worst_violation) {
      fam.worst_violation = violation;
      fam.region = j;
      fam.subunit = k;
      fam.period = t;
    }
  }
  void eq(double lhs, double rhs, int j = -1, int k = -1, int t = -1) {
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    hit(std::abs(lhs - rhs) / scale, j, k, t);
  }
  void le(double lhs, double rhs, int j = -1, int k = -1, int t = -1) {
    double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    hit((lhs - rhs) / scale, j, k, t);
  }
  void commit(FeasibilityReport& rep) {
    fam.pass = fam.worst_violation <= tol;
    rep.feasible = rep.feasible && fam.pass;
    rep.families.push_back(fam);
  }
};

}  // namespace

// Families checked, by meaning:
//   state-recursion   compartment updates and initial conditions
//   trigger-logic     indicator consistency, center brackets, pre-lead zeros
//   nonnegativity     every dose, flow and inventory quantity
//   initial-zero      no administration at period 0, pre-lead supply zeros
//   population        cumulative regional administration within population
//   capacity          sub-regional administration within local capacity
//   demand            regional administration within expected demand
//   linking           regional doses equal sub-regional doses plus center throughput
//   supplier          outbound shipments within production capacity
//   flow-balance      inventory balance at regions, sub-regions, pharmacies
//   budget            ledger total within budget
//   min-share         sub-regional per-capita at or above the declared floor
//   equity-floor      regional per-capita at or above zeta
FeasibilityReport check_full_feasibility(const Scenario& sc, const AllocationPlan& plan,
                                         const Trajectory& traj, double tol) {
  const int J = sc.num_regions(), K = sc.num_subregions();
  const int O = sc.num_centers(), M = sc.num_suppliers(), T = sc.horizon;
  const int l0 = sc.supply.lead_center;
  const double xi_keep = 1.0 - sc.supply.wastage;
  const int lag = dose_lag(sc.epidemic);

  FeasibilityReport rep;
  rep.tolerance = tol;

  // State recursion: recompute each step from the trajectory's own states.
  {
    Fam f("state-recursion", tol);
    for (int j = 0; j < J; ++j) {
      const EpidemicState& s0 = traj.states[0];
      f.eq(s0.s[j], sc.epidemic.pop_region[j] - sc.epidemic.init_i[j] + sc.epidemic.init_itilde[j], j, -1, 0);
      f.eq(s0.v[j], 0.0, j, -1, 0);
      f.eq(s0.i[j], sc.epidemic.init_i[j], j, -1, 0);
      f.eq(s0.r[j], sc.epidemic.init_r[j], j, -1, 0);
    }
    for (int t = 0; t < T; ++t) {
      const EpidemicState& cur = traj.states[t];
      const EpidemicState& nxt = traj.states[t + 1];
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
        in.reinfection = cur.itilde[j];
        StepOutcome ns = step_clamped(in);
        double scale = std::max(1.0, sc.epidemic.pop_region[j]);
        f.hit(ns.violation / scale, j, -1, t + 1);
        f.hit(std::abs(nxt.s[j] - ns.state.s) / scale, j, -1, t + 1);
        f.hit(std::abs(nxt.v[j] - ns.state.v) / scale, j, -1, t + 1);
        f.hit(std::abs(nxt.i[j] - ns.state.i) / scale, j, -1, t + 1);
        f.hit(std::abs(nxt.r[j] - ns.state.r) / scale, j, -1, t + 1);
        if (t + 1 >= sc.epidemic.t_r)
          f.eq(nxt.itilde[j], reinfection_inflow(traj, sc, j, t + 1), j, -1, t + 1);
      }
    }
    f.commit(rep);
  }

  // Trigger and opening logic. The budget-coupled forced-opening rows are
  // handled by the optimizer's budget switch, not re-checked here.
  {
    Fam f("trigger-logic", tol);
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t <= T; ++t) {
        if (t < l0) {
          if (plan.trig_i[j][t]) f.hit(1.0, j, -1, t);
          if (plan.trig_d[j][t]) f.hit(1.0, j, -1, t);
          continue;
        }
        double flux = traj.new_infections[j][t];
        double tau = traj.tau[j][t];
        double fscale = std::max({1.0, std::abs(flux), std::abs(tau)});
        if (plan.trig_i[j][t]) f.hit((tau - flux) / fscale, j, -1, t);
        else f.hit((flux - tau) / fscale, j, -1, t);

        double cap = 0.0;
        for (int k : sc.subregions_of[j]) cap += sc.supply.local_capacity[k][t];
        double dem = sc.supply.demand[j][t];
        double dscale = std::max({1.0, cap, dem});
        if (plan.trig_d[j][t]) f.hit((cap - dem) / dscale, j, -1, t);
        else f.hit((dem - cap) / dscale, j, -1, t);
      }
    }
    for (int o = 0; o < O; ++o) {
      int j = sc.region_of_center[o];
      for (int t = 0; t <= T; ++t) {
        if (t < l0 && plan.x[o][t]) f.hit(1.0, j, o, t);
        int allowed = int(plan.trig_i[j][t]) + int(plan.trig_d[j][t]);
        if (int(plan.x[o][t]) > allowed) f.hit(1.0, j, o, t);
      }
    }
    for (int j = 0; j < J; ++j)
      for (int t = 0; t <= T; ++t) {
        int open_count = 0;
        for (int o : sc.centers_of[j]) open_count += plan.x[o][t];
        if (open_count > 1) f.hit(double(open_count - 1), j, -1, t);
      }
    f.commit(rep);
  }

  {
    Fam f("nonnegativity", tol);
    auto scan = [&](const Matrix& m, int axis_is_region) {
      for (int a = 0; a < int(m.size()); ++a)
        for (int t = 0; t < int(m[a].size()); ++t)
          if (m[a][t] < 0.0)
            f.hit(-m[a][t] / std::max(1.0, std::abs(m[a][t])),
                  axis_is_region ? a : -1, axis_is_region ? -1 : a, t);
    };
    scan(plan.psi, 1);
    scan(plan.xi, 1);
    scan(plan.phi, 0);
    scan(plan.omega, 0);
    scan(plan.g2, 0);
    scan(plan.g3, 0);
    scan(plan.w1, 1);
    scan(plan.w2, 0);
    scan(plan.w3, 0);
    scan(plan.nu, 1);
    for (int i = 0; i < M; ++i) scan(plan.g1[i], 1);
    f.commit(rep);
  }

  // Initial conditions: no administration at period 0 and nothing moves
  // through a leg before its pipeline lead has elapsed.
  {
    Fam f("initial-zero", tol);
    for (int j = 0; j < J; ++j) {
      f.eq(plan.psi[j][0], 0.0, j, -1, 0);
      f.eq(plan.xi[j][0], 0.0, j, -1, 0);
      int first = sc.first_admin_period(j);
      for (int t = 1; t < first && t <= T; ++t) {
        f.eq(plan.psi[j][t], 0.0, j, -1, t);
        f.eq(plan.xi[j][t], 0.0, j, -1, t);
        f.eq(plan.w1[j][t], 0.0, j, -1, t);
      }
    }
    for (int k = 0; k < K; ++k) {
      int lead = sc.pipeline_lead(k);
      for (int t = 0; t < std::min(lead, T + 1); ++t) {
        f.eq(plan.phi[k][t], 0.0, sc.region_of_sub[k], k, t);
        f.eq(plan.omega[k][t], 0.0, sc.region_of_sub[k], k, t);
        f.eq(plan.w2[k][t], 0.0, sc.region_of_sub[k], k, t);
      }
      f.eq(plan.phi[k][0] + plan.omega[k][0], 0.0, sc.region_of_sub[k], k, 0);
    }
    f.commit(rep);
  }

  {
    Fam f("population", tol);
    for (int j = 0; j < J; ++j) {
      double total = 0.0;
      for (int t = 0; t <= T; ++t) total += plan.psi[j][t] + plan.xi[j][t];
      double scale = std::max(1.0, sc.epidemic.pop_region[j]);
      f.hit((total - sc.epidemic.pop_region[j]) / scale, j);
    }
    f.commit(rep);
  }

  {
    Fam f("capacity", tol);
    for (int k = 0; k < K; ++k)
      for (int t = 0; t <= T; ++t)
        f.le(plan.phi[k][t] + plan.omega[k][t], sc.supply.local_capacity[k][t],
             sc.region_of_sub[k], k, t);
    f.commit(rep);
  }

  {
    Fam f("demand", tol);
    for (int j = 0; j < J; ++j)
      for (int t = 0; t <= T; ++t)
        f.le(plan.psi[j][t] + plan.xi[j][t], sc.supply.demand[j][t], j, -1, t);
    f.commit(rep);
  }

  // Regional administration equals sub-regional administration plus the
  // throughput of centers opened lead_center periods earlier.
  {
    Fam f("linking", tol);
    for (int j = 0; j < J; ++j) {
      int first = sc.first_admin_period(j);
      for (int t = first; t <= T; ++t) {
        double subs = 0.0;
        for (int k : sc.subregions_of[j]) subs += plan.phi[k][t] + plan.omega[k][t];
        double centers = 0.0;
        for (int o : sc.centers_of[j])
          if (t - l0 >= 0) centers += sc.supply.center_capacity[o][t] * plan.x[o][t - l0];
        f.eq(plan.psi[j][t] + plan.xi[j][t], subs + xi_keep * centers, j, -1, t);
      }
    }
    f.commit(rep);
  }

  {
    Fam f("supplier", tol);
    for (int i = 0; i < M; ++i)
      for (int t = 0; t <= T; ++t) {
        double out = 0.0;
        for (int j = 0; j < J; ++j) out += plan.g1[i][j][t];
        f.le(out, sc.supply.supplier_capacity[i][t], -1, i, t);
      }
    f.commit(rep);
  }

  // Inventory balances in arrival form at every echelon.
  {
    Fam f("flow-balance", tol);
    for (int j = 0; j < J; ++j)
      for (int u = 0; u <= T; ++u) {
        double arrivals = 0.0;
        for (int i = 0; i < M; ++i) {
          int send = u - sc.supply.lead_1[i][j];
          if (send >= 0) arrivals += plan.g1[i][j][send];
        }
        double outflow = 0.0;
        for (int k : sc.subregions_of[j]) outflow += plan.g2[k][u];
        double center_draw = 0.0;
        for (int o : sc.centers_of[j])
          if (u - l0 >= 0) center_draw += sc.supply.center_capacity[o][u] * plan.x[o][u - l0];
        double prev = u > 0 ? plan.w1[j][u - 1] : 0.0;
        f.eq(prev + arrivals, outflow + center_draw + plan.w1[j][u], j, -1, u);
      }
    for (int k = 0; k < K; ++k)
      for (int u = 0; u <= T; ++u) {
        int send = u - sc.supply.lead_2[k];
        double arrivals = send >= 0 ? plan.g2[k][send] : 0.0;
        double outflow = 0.0;
        for (int l : sc.pharmacies_of[k]) outflow += plan.g3[l][u];
        double prev = u > 0 ? plan.w2[k][u - 1] : 0.0;
        f.eq(prev + arrivals, outflow + plan.w2[k][u], sc.region_of_sub[k], k, u);
      }
    for (int k = 0; k < K; ++k)
      for (int u = 0; u <= T; ++u) {
        double avail = 0.0, left = 0.0;
        for (int l : sc.pharmacies_of[k]) {
          int send = u - sc.supply.lead_3[l];
          if (send >= 0) {
            avail += plan.g3[l][send] + (send > 0 ? plan.w3[l][send - 1] : 0.0);
            left += plan.w3[l][send];
          }
        }
        f.eq(xi_keep * avail, plan.phi[k][u] + plan.omega[k][u] + left, sc.region_of_sub[k], k, u);
      }
    f.commit(rep);
  }

  {
    Fam f("budget", tol);
    CostLedger ledger = compute_cost(sc, plan);
    f.le(ledger.total, ledger.budget);
    f.commit(rep);
  }

  {
    Fam f("min-share", tol);
    for (int j = 0; j < J; ++j)
      for (int t = 0; t <= T; ++t)
        for (int k : sc.subregions_of[j]) {
          double share = (plan.phi[k][t] + plan.omega[k][t]) / sc.epidemic.pop_subregion[k];
          f.hit(plan.nu[j][t] - share, j, k, t);
        }
    f.commit(rep);
  }

  {
    Fam f("equity-floor", tol);
    for (int t = 0; t <= T; ++t)
      for (int j = 0; j < J; ++j) {
        double share = (plan.psi[j][t] + plan.xi[j][t]) / sc.epidemic.pop_region[j];
        f.hit(plan.zeta[t] - share, j, -1, t);
      }
    f.commit(rep);
  }

  return rep;
}

}  // namespace epivax
