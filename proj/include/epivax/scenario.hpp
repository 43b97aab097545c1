#pragma once

// Domain types: the immutable scenario description (hierarchy, epidemic,
// supply, cost and objective-weight parameters) plus the allocation-plan and
// cost-ledger value types shared by the whole library.

#include <cstdint>
#include <string>
#include <vector>

#include "epivax/common.hpp"

namespace epivax {

struct EpidemicParams {
  double mu = 14.0 / (75.0 * 365.0);  // recruitment (birth/death) per period
  double gamma = 1.0;                 // removal rate per period
  double gamma1 = 1.0;                // immunization rate; 1/gamma1 = dose-to-immunity lag
  int psi = 0;                        // 1 when vaccine immunity outlasts the horizon
  std::vector<double> sigma;          // reinfection rate per period, size T+1
  int t_r = 2;                        // immunity duration in periods
  Matrix beta;                        // [region][period] effective infection rate
  Matrix beta_vax;                    // [region][period] rate in the vaccinated
  std::vector<double> pop_region;     // eligible population per region
  std::vector<double> pop_subregion;  // eligible population per sub-region
  std::vector<double> init_i;         // infected at period 0
  std::vector<double> init_itilde;    // reinfection-susceptible at period 0
  std::vector<double> init_r;         // removed at period 0
};

struct SupplyParams {
  Matrix supplier_capacity;  // [supplier][period] doses
  Matrix local_capacity;     // [subregion][period] doses
  Matrix center_capacity;    // [center][period] doses
  int lead_center = 1;       // periods to open a mass vaccination center
  std::vector<std::vector<int>> lead_1;  // [supplier][region]
  std::vector<int> lead_2;               // per sub-region (arc from its region)
  std::vector<int> lead_3;               // per pharmacy (arc from its sub-region)
  double wastage = 0.0;                  // fraction lost in the last legs
  Matrix demand;                         // [region][period] persons
};

struct CostParams {
  double budget = 0.0;
  Matrix dose_cost;                        // [supplier][period]
  std::vector<std::vector<double>> transport_1;  // [supplier][region] per dose
  std::vector<double> transport_2;         // per sub-region arc
  std::vector<double> transport_3;         // per pharmacy arc
  std::vector<double> holding_1;           // per region node
  std::vector<double> holding_2;           // per sub-region node
  std::vector<double> holding_3;           // per pharmacy node
  std::vector<double> open_cost;           // per center
  Matrix admin_cost;                       // [region][period] per dose
};

struct ObjectiveWeights {
  double lambda0 = -1.0;   // infection-flux weight (negative favors fewer infections)
  double lambda11 = 1.0;   // min per-capita sum weight (Gini variant)
  double lambda12 = 1.0;   // max-Gini weight (Gini variant)
  double lambda21 = 1.0;   // min per-capita weight (knapsack variant)
  double lambda22 = 1.0;   // priority-weighted allocation weight (knapsack variant)
  double lambda_reg = 10.0;  // sub-regional floor regularizer
  bool normalized = false;   // divide flux by initial burden, doses by population
};

struct Scenario {
  int horizon = 0;              // T; decision periods run 1..T
  int period_length_days = 14;

  std::vector<int> suppliers;   // ids 0..M-1
  std::vector<int> regions;     // ids 0..J-1
  std::vector<std::vector<int>> subregions_of;  // region -> global sub-region ids
  std::vector<std::vector<int>> pharmacies_of;  // sub-region -> global pharmacy ids
  std::vector<std::vector<int>> centers_of;     // region -> global center ids

  EpidemicParams epidemic;
  SupplyParams supply;
  CostParams costs;
  ObjectiveWeights weights;

  std::vector<double> svi;     // per sub-region, in [0,1]
  std::vector<double> access;  // per region, healthcare access in [0,1]

  // Derived lookups, filled by finalize().
  std::vector<int> region_of_sub;
  std::vector<int> sub_of_pharmacy;
  std::vector<int> region_of_center;

  int num_suppliers() const { return int(suppliers.size()); }
  int num_regions() const { return int(regions.size()); }
  int num_subregions() const { return int(region_of_sub.size()); }
  int num_pharmacies() const { return int(sub_of_pharmacy.size()); }
  int num_centers() const { return int(region_of_center.size()); }

  double max_region_population() const;
  // Big-M used by indicator reasoning; ten times the largest region.
  double big_m() const { return 10.0 * max_region_population(); }

  // Earliest period at which region j can administer doses.
  int first_admin_period(int j) const;
  // Shortest supplier->pharmacy pipeline into sub-region k.
  int pipeline_lead(int k) const;

  void finalize();  // builds derived lookups; throws on structural nonsense
};

struct EpidemicState {
  std::vector<double> s, v, i, r, itilde;  // per region, person counts
};

struct Trajectory {
  std::vector<EpidemicState> states;  // size T+1
  Matrix tau;                         // [region][period] infection threshold
  Matrix new_infections;              // [region][period] incidence flux
};

struct AllocationPlan {
  Matrix psi, xi;       // regional doses to susceptible / recovered, [J][T+1]
  Matrix phi, omega;    // sub-regional doses, [K][T+1]
  std::vector<Matrix> g1;  // [supplier][region][period] shipments
  Matrix g2;            // [subregion][period] region -> sub-region shipments
  Matrix g3;            // [pharmacy][period] sub-region -> pharmacy shipments
  Matrix w1, w2, w3;    // inventories per region / sub-region / pharmacy
  std::vector<std::vector<std::uint8_t>> x;       // [center][period] open flag
  std::vector<std::vector<std::uint8_t>> trig_i;  // [region][period]
  std::vector<std::vector<std::uint8_t>> trig_d;  // [region][period]
  std::vector<double> zeta;  // per period, min regional per-capita administration
  Matrix nu;                 // [region][period] sub-regional per-capita floor

  static AllocationPlan zeros(const Scenario& sc);
};

struct CostLedger {
  // All vectors are per period, size T+1.
  std::vector<double> administration;
  std::vector<double> purchase;
  std::vector<double> transport_1, transport_2, transport_3;
  std::vector<double> holding_1, holding_2, holding_3;
  std::vector<double> opening;
  std::vector<double> period_total;
  std::vector<double> cumulative;
  double total = 0.0;
  double budget = 0.0;
  double slack = 0.0;
};

struct ObjectiveValues {
  double infection_flux_total = 0.0;  // sum of incidence over regions and periods
  double min_percapita_sum = 0.0;     // sum_t zeta_t
  double gini_max = 0.0;              // eta
  double knapsack_value = 0.0;        // priority-weighted allocation term
  double scalarized = 0.0;
};

enum class ObjectiveKind { Gini, Knapsack };

struct FeasibilityFamily {
  std::string name;
  bool pass = true;
  double worst_violation = 0.0;
  int region = -1, subunit = -1, period = -1;  // locus of the worst violation
};

struct FeasibilityReport {
  std::vector<FeasibilityFamily> families;
  bool feasible = true;
  double tolerance = 1e-6;

  const FeasibilityFamily* family(const std::string& name) const;
  std::string to_string() const;
};

// --- scenario-core operations ---

// Structural validation: hierarchy consistency, parameter signs, the
// beta ordering, and sub-region population sums.
FeasibilityReport validate_scenario(const Scenario& sc);

// Itemized supply-chain cost of a plan: administration, purchase, transport
// per echelon, holding per echelon, and center-opening charges on 0->1
// transitions. Fills slack = budget - total.
CostLedger compute_cost(const Scenario& sc, const AllocationPlan& plan);

// Objective evaluation against a trajectory produced from the same plan.
ObjectiveValues evaluate_objectives(const Scenario& sc, const AllocationPlan& plan,
                                    const Trajectory& traj,
                                    ObjectiveKind kind = ObjectiveKind::Knapsack);

// Constraint-by-constraint feasibility of (plan, trajectory) against the
// full formulation at the given relative tolerance.
FeasibilityReport check_full_feasibility(const Scenario& sc, const AllocationPlan& plan,
                                         const Trajectory& traj, double tol = 1e-6);

}  // namespace epivax
