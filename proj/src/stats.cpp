#include "epivax/stats.hpp"

#include <cmath>
#include <limits>

namespace epivax {

namespace {

double beta_cf(double a, double b, double x) {
  // Lentz's algorithm for the continued fraction of the incomplete beta.
  const int max_iter = 400;
  const double eps = 1e-15, tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) fail("bad-argument", "incomplete beta argument outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                    b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_two_tailed_p(double t, int dof) {
  if (dof < 1) fail("bad-argument", "degrees of freedom must be positive");
  double x = double(dof) / (double(dof) + t * t);
  return incomplete_beta(double(dof) / 2.0, 0.5, x);
}

TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail("series-shape", "paired series must have equal length");
  const int n = int(a.size());
  if (n < 2) fail("series-short", "paired t-test needs at least two pairs");

  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= double(n);
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double d = a[i] - b[i] - mean;
    ss += d * d;
  }
  double var = ss / double(n - 1);

  TTestResult out;
  out.dof = n - 1;
  if (var == 0.0) {
    if (mean == 0.0) {
      out.t = 0.0;
      out.p_value = 1.0;
    } else {
      out.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
      out.p_value = 0.0;
      out.degenerate = true;
    }
    return out;
  }
  out.t = mean / std::sqrt(var / double(n));
  out.p_value = t_two_tailed_p(out.t, out.dof);
  return out;
}

}  // namespace epivax
