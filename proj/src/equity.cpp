#include "epivax/equity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epivax {

double gini_coefficient(const std::vector<double>& u) {
  const std::size_t n = u.size();
  if (n == 0) fail("gini-empty", "per-capita vector is empty");
  double mean = 0.0;
  for (double v : u) {
    if (v < 0.0) fail("gini-negative", "negative per-capita entry");
    mean += v;
  }
  mean /= double(n);
  if (mean == 0.0) return 0.0;  // all-zero allocation counts as perfectly equal
  double abs_sum = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double diff = std::abs(u[a] - u[b]);
      // Entries equal up to representation dust count as exactly equal, so
      // proportional allocations report a hard zero.
      if (diff <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(u[a], u[b])) continue;
      abs_sum += diff;
    }
  return abs_sum / (2.0 * mean * double(n) * double(n));
}

namespace {

int svi_bin(double svi) {
  // Four quartile categories on [0,1].
  if (svi < 0.25) return 1;
  if (svi < 0.5) return 2;
  if (svi < 0.75) return 3;
  return 4;
}

}  // namespace

PriorityComponents county_priority_components(const std::vector<double>& svi,
                                              const std::vector<double>& beta0,
                                              const std::vector<double>& pop,
                                              const std::vector<std::vector<int>>& groups) {
  const int K = int(svi.size());
  if (int(beta0.size()) != K || int(pop.size()) != K)
    fail("priority-shape", "component vectors have mismatched lengths");
  PriorityComponents out;
  out.d_svi.assign(K, 0.0);
  out.d_beta.assign(K, 0.0);
  out.d_pop.assign(K, 0.0);

  for (std::size_t j = 0; j < groups.size(); ++j) {
    const auto& subs = groups[j];
    if (subs.empty()) fail("priority-empty-region", "region without sub-regions: " + std::to_string(j));
    int max_bin = 0;
    double max_beta = 0.0, max_pop = 0.0;
    for (int k : subs) {
      max_bin = std::max(max_bin, svi_bin(svi[k]));
      max_beta = std::max(max_beta, beta0[k]);
      max_pop = std::max(max_pop, pop[k]);
    }
    for (int k : subs) {
      out.d_svi[k] = double(svi_bin(svi[k])) / double(max_bin);
      out.d_beta[k] = max_beta > 0.0 ? beta0[k] / max_beta : 0.0;
      out.d_pop[k] = max_pop > 0.0 ? pop[k] / max_pop : 0.0;
    }
  }
  return out;
}

PriorityComponents county_priority_components(const Scenario& sc) {
  std::vector<double> beta0(sc.num_subregions(), 0.0);
  for (int k = 0; k < sc.num_subregions(); ++k)
    beta0[k] = sc.epidemic.beta[sc.region_of_sub[k]][0];
  return county_priority_components(sc.svi, beta0, sc.epidemic.pop_subregion, sc.subregions_of);
}

KnapsackWeights priority_weights(const Scenario& sc, const PriorityComponents& comp) {
  const int K = sc.num_subregions();
  KnapsackWeights out;
  out.composite.assign(K, 0.0);
  out.rho.assign(K, 0.0);
  out.delta.assign(K, 0.0);
  for (int k = 0; k < K; ++k)
    out.composite[k] = std::sqrt(comp.d_svi[k] * comp.d_svi[k] + comp.d_beta[k] * comp.d_beta[k] +
                                 comp.d_pop[k] * comp.d_pop[k]);
  for (int j = 0; j < sc.num_regions(); ++j) {
    double sum = 0.0;
    for (int k : sc.subregions_of[j]) sum += out.composite[k];
    if (sum <= 0.0) fail("priority-degenerate", "zero composite score sum in region " + std::to_string(j));
    for (int k : sc.subregions_of[j]) {
      out.rho[k] = out.composite[k] / sum;
      out.delta[k] = (1.0 - sc.access[j]) * out.rho[k];
    }
  }
  return out;
}

KnapsackWeights scenario_priority_weights(const Scenario& sc) {
  return priority_weights(sc, county_priority_components(sc));
}

GiniReport plan_equity_report(const Scenario& sc, const AllocationPlan& plan) {
  const int J = sc.num_regions(), K = sc.num_subregions(), T = sc.horizon;
  GiniReport out;
  out.per_capita.assign(K, 0.0);
  out.region_mean.assign(J, 0.0);
  out.region_gini.assign(J, 0.0);
  out.zeta.assign(T + 1, 0.0);

  for (int k = 0; k < K; ++k) {
    double n = sc.epidemic.pop_subregion[k];
    if (n <= 0.0) fail("zero-population", "sub-region " + std::to_string(k) + " has no population");
    double doses = 0.0;
    for (int t = 0; t <= T; ++t) doses += plan.phi[k][t] + plan.omega[k][t];
    out.per_capita[k] = doses / n;
  }

  for (int j = 0; j < J; ++j) {
    std::vector<double> u;
    u.reserve(sc.subregions_of[j].size());
    for (int k : sc.subregions_of[j]) u.push_back(out.per_capita[k]);
    double mean = 0.0;
    for (double v : u) mean += v;
    out.region_mean[j] = u.empty() ? 0.0 : mean / double(u.size());
    out.region_gini[j] = gini_coefficient(u);
    out.max_gini = std::max(out.max_gini, out.region_gini[j]);
  }

  for (int t = 0; t <= T; ++t) {
    double zmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < J; ++j) {
      double n = sc.epidemic.pop_region[j];
      if (n <= 0.0) fail("zero-population", "region " + std::to_string(j) + " has no population");
      zmin = std::min(zmin, (plan.psi[j][t] + plan.xi[j][t]) / n);
    }
    out.zeta[t] = J > 0 ? zmin : 0.0;
  }
  return out;
}

}  // namespace epivax
