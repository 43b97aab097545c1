#pragma once

// Discrete-time SVIR propagation with reinfection inflow, per-region
// infection thresholds, and the trigger indicators that drive center
// openings.

#include "epivax/scenario.hpp"

namespace epivax {

struct StepInputs {
  // State at period t for one region.
  double s = 0, v = 0, i = 0, r = 0;
  double n = 0;            // eligible population (recruitment reference)
  double beta = 0;         // effective infection rate
  double beta_vax = 0;     // rate in the vaccinated
  double mu = 0, gamma = 0, gamma1 = 1;
  int psi = 0;
  double dose_lagged = 0;  // doses administered 1/gamma1 periods ago
  double dose_recovered = 0;  // doses to the recovered at t
  double reinfection = 0;     // inflow of reinfection-susceptible at t
};

struct RegionState {
  double s = 0, v = 0, i = 0, r = 0;
};

struct StepOutcome {
  RegionState state;
  double violation = 0.0;      // magnitude below the structural floor
  const char* compartment = nullptr;
};

// One SVIR step. Recruitment enters as mu * n (person counts throughout).
// The printed decay factors can undershoot zero on their own once the
// combined outflow rate of a compartment passes one per period (for example
// removal rate one with positive recruitment); that structural overshoot is
// clamped. Anything below it - over-dosing - is reported as a violation.
StepOutcome step_clamped(const StepInputs& in, double tol = 1e-9);

// Same update, raising a state-underflow error on any violation.
RegionState step(const StepInputs& in, double tol = 1e-9);

// Raw update with no guard or clamp.
RegionState step_unguarded(const StepInputs& in);

// Dose-to-immunity lag in whole periods.
int dose_lag(const EpidemicParams& p);

// Reinfection inflow at (j, t): zero before t_r, afterwards the rate times
// the incidence flux t_r periods earlier.
double reinfection_inflow(const Trajectory& traj, const Scenario& sc, int j, int t);

// Incidence flux beta*S*I + beta_vax*V*I for region j at period t.
double infection_flux(const Scenario& sc, const EpidemicState& st, int j, int t);

// Full propagation of a plan: initial conditions, per-period stepping,
// flux and threshold series.
Trajectory simulate(const Scenario& sc, const AllocationPlan& plan);

// Infection threshold: three-period mean of past fluxes once available,
// otherwise half of the initial-pressure product.
double infection_threshold(const Trajectory& traj, const Scenario& sc, int j, int t);

struct TriggerPair {
  bool infection = false;  // current flux strictly above the threshold
  bool demand = false;     // local capacity strictly below expected demand
};

// Both indicators are zero before the center-opening lead time has passed.
TriggerPair trigger_indicators(const Trajectory& traj, const Scenario& sc, int j, int t);

}  // namespace epivax
