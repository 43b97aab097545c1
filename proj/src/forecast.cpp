#include "epivax/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace epivax {

std::string SarimaOrder::label() const {
  std::ostringstream os;
  os << "(" << p << "," << d << "," << q << ")x(" << P << "," << D << "," << Q << ")_" << m;
  return os.str();
}

std::vector<double> SarimaFit::coefficients() const {
  std::vector<double> c;
  if (order.p) c.push_back(phi);
  if (order.q) c.push_back(theta);
  if (order.P) c.push_back(seasonal_phi);
  if (order.Q) c.push_back(seasonal_theta);
  return c;
}

std::vector<double> seasonal_difference(const std::vector<double>& series, int d, int D, int m) {
  if (d < 0 || D < 0 || m < 1) fail("bad-order", "differencing orders must be non-negative, m >= 1");
  if (int(series.size()) <= d + D * m)
    fail("series-short", "series too short for the requested differencing");
  std::vector<double> w = series;
  for (int r = 0; r < d; ++r) {
    std::vector<double> next(w.size() - 1);
    for (std::size_t t = 1; t < w.size(); ++t) next[t - 1] = w[t] - w[t - 1];
    w = std::move(next);
  }
  for (int r = 0; r < D; ++r) {
    if (int(w.size()) <= m) fail("series-short", "series too short for seasonal differencing");
    std::vector<double> next(w.size() - m);
    for (std::size_t t = m; t < w.size(); ++t) next[t - m] = w[t] - w[t - m];
    w = std::move(next);
  }
  return w;
}

namespace {

struct Coeffs {
  double phi = 0.0, theta = 0.0, sphi = 0.0, stheta = 0.0;
};

// Residual recursion on the differenced scale, zero presample values.
double css(const std::vector<double>& w, const SarimaOrder& o, const Coeffs& c,
           std::vector<double>* residuals_out = nullptr) {
  const int n = int(w.size());
  const int m = o.m;
  std::vector<double> e(n, 0.0);
  auto wat = [&](int t) { return t >= 0 ? w[t] : 0.0; };
  auto eat = [&](int t) { return t >= 0 ? e[t] : 0.0; };
  double sse = 0.0;
  for (int t = 0; t < n; ++t) {
    double pred = 0.0;
    if (o.p) pred += c.phi * wat(t - 1);
    if (o.P) pred += c.sphi * wat(t - m);
    if (o.p && o.P) pred -= c.phi * c.sphi * wat(t - m - 1);
    if (o.q) pred += c.theta * eat(t - 1);
    if (o.Q) pred += c.stheta * eat(t - m);
    if (o.q && o.Q) pred += c.theta * c.stheta * eat(t - m - 1);
    e[t] = w[t] - pred;
    sse += e[t] * e[t];
  }
  if (residuals_out) *residuals_out = std::move(e);
  return sse;
}

// Least squares through normal equations with a light ridge term.
std::vector<double> least_squares(const std::vector<std::vector<double>>& x,
                                  const std::vector<double>& y) {
  const int k = x.empty() ? 0 : int(x[0].size());
  const int n = int(x.size());
  std::vector<std::vector<double>> ata(k, std::vector<double>(k + 1, 0.0));
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      double s = 0.0;
      for (int t = 0; t < n; ++t) s += x[t][a] * x[t][b];
      ata[a][b] = s;
    }
    double s = 0.0;
    for (int t = 0; t < n; ++t) s += x[t][a] * y[t];
    ata[a][k] = s;
    ata[a][a] += 1e-8;
  }
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
    if (std::abs(ata[piv][col]) < 1e-12) return std::vector<double>(k, 0.0);
    std::swap(ata[piv], ata[col]);
    for (int r = col + 1; r < k; ++r) {
      double factor = ata[r][col] / ata[col][col];
      for (int c = col; c <= k; ++c) ata[r][c] -= factor * ata[col][c];
    }
  }
  std::vector<double> beta(k, 0.0);
  for (int r = k - 1; r >= 0; --r) {
    double s = ata[r][k];
    for (int c = r + 1; c < k; ++c) s -= ata[r][c] * beta[c];
    beta[r] = s / ata[r][r];
  }
  return beta;
}

double clamp_coeff(double v) { return std::clamp(v, -0.98, 0.98); }

// Nelder-Mead over the active coefficients.
Coeffs refine(const std::vector<double>& w, const SarimaOrder& o, Coeffs start, bool* converged) {
  std::vector<int> active;  // 0:phi 1:theta 2:sphi 3:stheta
  if (o.p) active.push_back(0);
  if (o.q) active.push_back(1);
  if (o.P) active.push_back(2);
  if (o.Q) active.push_back(3);
  const int dim = int(active.size());
  *converged = true;
  if (dim == 0) return start;

  auto pack = [&](const Coeffs& c) {
    std::vector<double> v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = active[i] == 0 ? c.phi : active[i] == 1 ? c.theta : active[i] == 2 ? c.sphi : c.stheta;
    return v;
  };
  auto unpack = [&](const std::vector<double>& v) {
    Coeffs c;
    for (int i = 0; i < dim; ++i) {
      double x = clamp_coeff(v[i]);
      if (active[i] == 0) c.phi = x;
      else if (active[i] == 1) c.theta = x;
      else if (active[i] == 2) c.sphi = x;
      else c.stheta = x;
    }
    return c;
  };
  auto objective = [&](const std::vector<double>& v) {
    double penalty = 0.0;
    for (double x : v)
      if (std::abs(x) > 0.98) penalty += 1e6 * (std::abs(x) - 0.98);
    return css(w, o, unpack(v)) * (1.0 + penalty) + penalty;
  };

  std::vector<std::vector<double>> simplex(dim + 1, pack(start));
  for (int i = 0; i < dim; ++i) simplex[i + 1][i] += 0.2;
  std::vector<double> value(dim + 1);
  for (int i = 0; i <= dim; ++i) value[i] = objective(simplex[i]);

  const int max_iter = 400;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<int> order_idx(dim + 1);
    for (int i = 0; i <= dim; ++i) order_idx[i] = i;
    std::stable_sort(order_idx.begin(), order_idx.end(),
                     [&](int a, int b) { return value[a] < value[b]; });
    int best = order_idx[0], worst = order_idx[dim], second = order_idx[dim ? dim - 1 : 0];
    if (std::abs(value[worst] - value[best]) <= 1e-12 * (1.0 + std::abs(value[best]))) break;

    std::vector<double> centroid(dim, 0.0);
    for (int i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (int k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
    }
    for (int k = 0; k < dim; ++k) centroid[k] /= double(dim);

    auto moved = [&](double coef) {
      std::vector<double> v(dim);
      for (int k = 0; k < dim; ++k) v[k] = centroid[k] + coef * (centroid[k] - simplex[worst][k]);
      return v;
    };
    std::vector<double> reflect = moved(1.0);
    double fr = objective(reflect);
    if (fr < value[best]) {
      std::vector<double> expand = moved(2.0);
      double fe = objective(expand);
      if (fe < fr) { simplex[worst] = expand; value[worst] = fe; }
      else { simplex[worst] = reflect; value[worst] = fr; }
    } else if (fr < value[second]) {
      simplex[worst] = reflect;
      value[worst] = fr;
    } else {
      std::vector<double> contract = moved(-0.5);
      double fc = objective(contract);
      if (fc < value[worst]) { simplex[worst] = contract; value[worst] = fc; }
      else {
        for (int i = 0; i <= dim; ++i) {
          if (i == best) continue;
          for (int k = 0; k < dim; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          value[i] = objective(simplex[i]);
        }
      }
    }
  }
  if (iter >= max_iter) *converged = false;

  int best = 0;
  for (int i = 1; i <= dim; ++i)
    if (value[i] < value[best]) best = i;
  return unpack(simplex[best]);
}

}  // namespace

SarimaFit fit_sarima(const std::vector<double>& series, const SarimaOrder& o) {
  if (o.p < 0 || o.p > 1 || o.q < 0 || o.q > 1 || o.P < 0 || o.P > 1 || o.Q < 0 || o.Q > 1 ||
      o.D < 0 || o.D > 1 || o.d < 0 || o.d > 2 || o.m < 1)
    fail("bad-order", "orders outside the searched box: " + o.label());
  for (double v : series)
    if (!std::isfinite(v)) fail("series-nonfinite", "series contains a non-finite value");
  std::vector<double> w = seasonal_difference(series, o.d, o.D, o.m);
  const int n = int(w.size());
  const int k_coef = o.coefficient_count();
  if (n < 3 * std::max(k_coef, 1))
    fail("series-short", "differenced length " + std::to_string(n) + " too short for order " + o.label());

  // Hannan-Rissanen: residual proxy from a long autoregression, then a
  // single least-squares pass over the active regressors.
  Coeffs init;
  if (k_coef > 0) {
    int long_p = std::min(n / 4, 8);
    std::vector<double> proxy(n, 0.0);
    if (long_p >= 1 && n > 2 * long_p) {
      std::vector<std::vector<double>> xrows;
      std::vector<double> yvals;
      for (int t = long_p; t < n; ++t) {
        std::vector<double> row(long_p);
        for (int k = 0; k < long_p; ++k) row[k] = w[t - 1 - k];
        xrows.push_back(std::move(row));
        yvals.push_back(w[t]);
      }
      std::vector<double> ar = least_squares(xrows, yvals);
      for (int t = 0; t < n; ++t) {
        double pred = 0.0;
        for (int k = 0; k < long_p; ++k) pred += ar[k] * (t - 1 - k >= 0 ? w[t - 1 - k] : 0.0);
        proxy[t] = w[t] - pred;
      }
    } else {
      proxy = w;
    }

    std::vector<std::vector<double>> xrows;
    std::vector<double> yvals;
    auto at = [&](const std::vector<double>& s, int t) { return t >= 0 ? s[t] : 0.0; };
    for (int t = 0; t < n; ++t) {
      std::vector<double> row;
      if (o.p) row.push_back(at(w, t - 1));
      if (o.q) row.push_back(at(proxy, t - 1));
      if (o.P) row.push_back(at(w, t - o.m));
      if (o.Q) row.push_back(at(proxy, t - o.m));
      xrows.push_back(std::move(row));
      yvals.push_back(w[t]);
    }
    std::vector<double> beta = least_squares(xrows, yvals);
    int pos = 0;
    if (o.p) init.phi = clamp_coeff(beta[pos++]);
    if (o.q) init.theta = clamp_coeff(beta[pos++]);
    if (o.P) init.sphi = clamp_coeff(beta[pos++]);
    if (o.Q) init.stheta = clamp_coeff(beta[pos++]);
  }

  bool converged = true;
  double init_sse = css(w, o, init);
  Coeffs best = refine(w, o, init, &converged);
  std::vector<double> residuals;
  double sse = css(w, o, best, &residuals);
  if (sse > init_sse) {  // refinement never loses to its start
    best = init;
    sse = css(w, o, best, &residuals);
  }

  SarimaFit fit;
  fit.order = o;
  fit.phi = best.phi;
  fit.theta = best.theta;
  fit.seasonal_phi = best.sphi;
  fit.seasonal_theta = best.stheta;
  fit.converged = converged;
  fit.residuals = std::move(residuals);
  fit.series = series;
  fit.differenced = w;
  fit.sigma2 = sse / double(n);
  double mean_sq = std::max(sse / double(n), 1e-300);
  fit.log_likelihood = -0.5 * double(n) * std::log(mean_sq);
  fit.aic = double(n) * std::log(mean_sq) + 2.0 * double(k_coef + 1);
  return fit;
}

SarimaFit select_by_aic(const std::vector<double>& series, int m_max) {
  if (m_max < 1) fail("bad-order", "m_max must be at least 1");
  bool have = false;
  SarimaFit best_fit;
  for (int m = 1; m <= m_max; ++m)
    for (int p = 0; p <= 1; ++p)
      for (int q = 0; q <= 1; ++q)
        for (int P = 0; P <= 1; ++P)
          for (int D = 0; D <= 1; ++D)
            for (int Q = 0; Q <= 1; ++Q) {
              SarimaOrder o{p, 1, q, P, D, Q, m};
              SarimaFit fit;
              try {
                fit = fit_sarima(series, o);
              } catch (const Error&) {
                continue;
              }
              if (!have) { best_fit = fit; have = true; continue; }
              double a = fit.aic, b = best_fit.aic;
              bool better = a < b;
              if (a == b) {
                if (fit.order.coefficient_count() < best_fit.order.coefficient_count()) better = true;
                else if (fit.order.coefficient_count() == best_fit.order.coefficient_count() &&
                         fit.order.m < best_fit.order.m)
                  better = true;
              }
              if (better) best_fit = fit;
            }
  if (!have) fail("sarima-all-failed", "no order in the grid produced a fit");
  return best_fit;
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) fail("bad-level", "quantile probability must lie in (0,1)");
  // Acklam's rational approximation with one Halley polish step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  double x;
  if (prob < 0.02425) {
    double u = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else if (prob > 1.0 - 0.02425) {
    double u = std::sqrt(-2.0 * std::log(1.0 - prob));
    x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
        ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  } else {
    double u = prob - 0.5, r = u * u;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Halley refinement against erfc.
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
  double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
  double u = e / pdf;
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

namespace {

// Polynomial multiply: (1 + sum a_k B^k)(1 + sum b_k B^k).
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

Forecast forecast_interval(const SarimaFit& fit, int horizon, double level) {
  if (horizon < 1) fail("bad-horizon", "forecast horizon must be at least 1");
  if (!(level > 0.0 && level < 1.0)) fail("bad-level", "interval level must lie in (0,1)");
  const SarimaOrder& o = fit.order;
  const int m = o.m;

  // Combined autoregressive-side operator including the differencing.
  std::vector<double> ar{1.0};
  for (int r = 0; r < o.d; ++r) ar = poly_mul(ar, {1.0, -1.0});
  for (int r = 0; r < o.D; ++r) {
    std::vector<double> seasonal(m + 1, 0.0);
    seasonal[0] = 1.0;
    seasonal[m] = -1.0;
    ar = poly_mul(ar, seasonal);
  }
  if (o.p) ar = poly_mul(ar, {1.0, -fit.phi});
  if (o.P) {
    std::vector<double> seasonal(m + 1, 0.0);
    seasonal[0] = 1.0;
    seasonal[m] = -fit.seasonal_phi;
    ar = poly_mul(ar, seasonal);
  }
  std::vector<double> ma{1.0};
  if (o.q) ma = poly_mul(ma, {1.0, fit.theta});
  if (o.Q) {
    std::vector<double> seasonal(m + 1, 0.0);
    seasonal[0] = 1.0;
    seasonal[m] = fit.seasonal_theta;
    ma = poly_mul(ma, seasonal);
  }

  // Histories: original-scale values plus residuals aligned to the tail.
  const int n = int(fit.series.size());
  const int shift = n - int(fit.residuals.size());
  std::vector<double> y = fit.series;
  std::vector<double> e(n, 0.0);
  for (int t = 0; t < int(fit.residuals.size()); ++t) e[shift + t] = fit.residuals[t];

  Forecast fc;
  fc.horizon = horizon;
  fc.level = level;
  double z = normal_quantile(0.5 + level / 2.0);

  // psi weights of the combined operator.
  std::vector<double> psi(horizon, 0.0);
  double cum = 0.0;
  for (int i = 0; i < horizon; ++i) {
    double v = i == 0 ? 1.0 : (i < int(ma.size()) ? ma[i] : 0.0);
    for (int k = 1; k <= std::min<int>(i, int(ar.size()) - 1); ++k) v -= ar[k] * psi[i - k];
    psi[i] = v;
  }

  for (int h = 0; h < horizon; ++h) {
    double pred = 0.0;
    int t = n + h;
    auto yat = [&](int idx) -> double {
      if (idx < 0) return 0.0;
      if (idx < n) return y[idx];
      return fc.point[idx - n];
    };
    auto eat = [&](int idx) -> double { return (idx >= 0 && idx < n) ? e[idx] : 0.0; };
    for (int k = 1; k < int(ar.size()); ++k) pred -= ar[k] * yat(t - k);
    for (int k = 1; k < int(ma.size()); ++k) pred += ma[k] * eat(t - k);
    fc.point.push_back(pred);
    cum += psi[h] * psi[h];
    double half = z * std::sqrt(std::max(fit.sigma2, 0.0) * cum);
    fc.lower.push_back(pred - half);
    fc.upper.push_back(pred + half);
  }
  return fc;
}

}  // namespace epivax
