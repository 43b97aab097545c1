#include "epivax/calibration.hpp"

#include <algorithm>
#include <cmath>

namespace epivax {

double adjust_underreporting(double cases, double rate) {
  if (rate < 0.0 || rate >= 1.0) fail("bad-rate", "underreporting rate must lie in [0,1)");
  return cases / (1.0 - rate);
}

double effective_reproduction(double beta, double gamma, double s, double n) {
  if (n <= 0.0) fail("zero-population", "population must be positive");
  return beta * gamma * (1.0 - s / n);
}

namespace {

// Partial-pivot elimination on a 3x3 system. Returns false when a pivot
// falls below the singularity threshold.
bool solve3(double a[3][4], double out[3], double pivot_tol) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < pivot_tol) return false;
    if (piv != col)
      for (int c = col; c < 4; ++c) std::swap(a[piv][c], a[col][c]);
    for (int r = col + 1; r < 3; ++r) {
      double factor = a[r][col] / a[col][col];
      for (int c = col; c < 4; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = a[r][3];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * out[c];
    out[r] = s / a[r][r];
  }
  return true;
}

}  // namespace

CalibratedRates calibrate_effective_rates(const ObservedSeries& obs, const EpidemicParams& params,
                                          const CalibrationOptions& opt) {
  if (opt.reduction < 0.0 || opt.reduction > 1.0) fail("bad-rate", "reduction must lie in [0,1]");
  const int J = obs.num_regions;
  const int P = obs.num_periods;
  if (int(obs.reported_cases.size()) != J || int(obs.doses_administered.size()) != J)
    fail("series-shape", "observed series do not match the region count");

  CalibratedRates out;
  out.beta = zeros(J, P);
  out.beta_vax = zeros(J, P);
  out.r_effective = zeros(J, P);
  out.susceptible = zeros(J, P + 1);
  out.vaccinated = zeros(J, P + 1);
  out.missing.assign(J, std::vector<bool>(P, false));

  const double mu = params.mu;
  const double gamma = params.gamma;
  const double r = opt.reduction;

  for (int j = 0; j < J; ++j) {
    double n = obs.population[j];
    if (n <= 0.0) fail("zero-population", "region " + std::to_string(j) + " has no population");
    double s = opt.seed_unit_infection ? n - 1.0 : n - params.init_i[j];
    double v = 0.0;
    double i = opt.seed_unit_infection ? 1.0 : params.init_i[j];
    out.susceptible[j][0] = s;
    out.vaccinated[j][0] = 0.0;

    for (int t = 0; t < P; ++t) {
      double cases = adjust_underreporting(obs.reported_cases[j][t], obs.underreporting_rate);
      double doses_prev = t >= 1 ? obs.doses_administered[j][t - 1] : 0.0;

      // Unknowns: beta, S(t+1), V(t+1). Row 1 is the susceptible recursion,
      // row 2 equates incidence with the flux, row 3 is the vaccinated
      // recursion. Recruitment is in person counts (mu * N), matching the
      // simulator.
      double a[3][4] = {
          {s * i, 1.0, 0.0, (1.0 - mu) * s + mu * n - doses_prev},
          {r * v * i + s * i, 0.0, 0.0, cases},
          {r * v * i, 0.0, 1.0, (1.0 - mu) * v + doses_prev},
      };
      double x[3] = {0.0, 0.0, 0.0};
      bool ok = solve3(a, x, opt.pivot_tolerance);
      if (!ok) {
        out.missing[j][t] = true;
        out.notes.push_back("singular system at region " + std::to_string(j) + " period " +
                            std::to_string(t));
        // Propagate the states with zero transmission so later periods stay defined.
        x[0] = 0.0;
        x[1] = (1.0 - mu) * s + mu * n - doses_prev;
        x[2] = (1.0 - mu) * v + doses_prev;
      } else if (x[0] < 0.0) {
        out.missing[j][t] = true;
        out.notes.push_back("negative rate at region " + std::to_string(j) + " period " +
                            std::to_string(t));
      }
      out.beta[j][t] = x[0];
      out.beta_vax[j][t] = r * x[0];
      out.r_effective[j][t] = effective_reproduction(x[0], gamma, s, n);

      // Advance the infected stock with the adjusted incidence.
      i = (1.0 - mu) * i + cases - gamma * i;
      if (i < 0.0) i = 0.0;
      s = x[1];
      v = x[2];
      out.susceptible[j][t + 1] = s;
      out.vaccinated[j][t + 1] = v;
    }
  }

  if (opt.interpolate_gaps) {
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < P; ++t) {
        if (!out.missing[j][t]) continue;
        int lo = t - 1;
        while (lo >= 0 && out.missing[j][lo]) --lo;
        int hi = t + 1;
        while (hi < P && out.missing[j][hi]) ++hi;
        double a = lo >= 0 ? out.beta[j][lo] : (hi < P ? out.beta[j][hi] : 0.0);
        double b = hi < P ? out.beta[j][hi] : a;
        double w = (hi > lo) ? double(t - lo) / double(hi - lo) : 0.0;
        out.beta[j][t] = a + (b - a) * w;
        out.beta_vax[j][t] = opt.reduction * out.beta[j][t];
      }
    }
  }

  return out;
}

}  // namespace epivax
