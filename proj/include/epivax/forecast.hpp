#pragma once

// SARIMA(p,d,q)x(P,D,Q)_m fitting by conditional sum of squares, AIC grid
// search over the {0,1} order box, and Gaussian interval forecasting.

#include <vector>

#include "epivax/common.hpp"

namespace epivax {

struct SarimaOrder {
  int p = 0, d = 1, q = 0;
  int P = 0, D = 0, Q = 0;
  int m = 1;

  int coefficient_count() const { return p + q + P + Q; }
  std::string label() const;
};

struct SarimaFit {
  SarimaOrder order;
  double phi = 0.0, theta = 0.0, seasonal_phi = 0.0, seasonal_theta = 0.0;
  double sigma2 = 0.0;       // SSE / n on the differenced scale
  double log_likelihood = 0.0;  // Gaussian CSS proxy
  double aic = 0.0;          // n*ln(SSE/n) + 2k, k = coefficients + 1
  bool converged = true;
  std::vector<double> residuals;       // one per differenced observation
  std::vector<double> series;          // original series the fit was built on
  std::vector<double> differenced;

  std::vector<double> coefficients() const;
};

struct Forecast {
  int horizon = 0;
  std::vector<double> point;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.95;
};

// (1-B)^d (1-B^m)^D applied to the series.
std::vector<double> seasonal_difference(const std::vector<double>& series, int d, int D, int m);

// Hannan-Rissanen initialization followed by derivative-free simplex
// refinement of the conditional sum of squares.
SarimaFit fit_sarima(const std::vector<double>& series, const SarimaOrder& order);

// Exhaustive grid over (p,q) in {0,1}^2, d = 1, (P,D,Q) in {0,1}^3 and
// m in [1, m_max]; minimal AIC wins, ties broken by fewer coefficients,
// then smaller m.
SarimaFit select_by_aic(const std::vector<double>& series, int m_max = 8);

// Recursive point forecasts with interval half-width z * sigma_h, where
// sigma_h accumulates the psi weights of the combined operator.
Forecast forecast_interval(const SarimaFit& fit, int horizon, double level = 0.95);

// Inverse standard normal CDF, |error| below 1e-10 over (0,1).
double normal_quantile(double prob);

}  // namespace epivax
