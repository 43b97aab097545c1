#include "epivax/lp.hpp"

#include <algorithm>
#include <cmath>

namespace epivax::lp {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

void LinearProgram::check_shape() const {
  const std::size_t n = objective.size();
  if (lower.size() != n || upper.size() != n)
    fail("lp-shape", "bound vectors do not match variable count");
  for (std::size_t j = 0; j < n; ++j)
    if (lower[j] > upper[j]) fail("lp-shape", "lower bound above upper bound at variable " + std::to_string(j));
  for (const Row& r : rows) {
    if (r.coeffs.size() != n) fail("lp-shape", "row width does not match variable count");
    if (!std::isfinite(r.rhs)) fail("lp-shape", "non-finite right-hand side");
  }
}

namespace {

// Internal tableau over structural variables plus one slack per row.
// Slack bounds encode the row sense; the basis starts as the slack set.
struct Tableau {
  int m = 0;         // rows
  int n = 0;         // total columns (structural + slacks)
  int n_struct = 0;  // structural columns
  std::vector<double> A;   // m x n, row-major (structural part only; slack is identity)
  std::vector<double> b;
  std::vector<double> lo, hi;
  std::vector<double> cost;  // maximization

  double a(int i, int j) const {
    return j < n_struct ? A[std::size_t(i) * n_struct + j] : (i == j - n_struct ? 1.0 : 0.0);
  }
};

enum VarState : char { AtLower, AtUpper, Basic, FreeZero };

struct Basis {
  std::vector<int> basic;        // size m: variable index in each basic row
  std::vector<char> state;       // size n
  std::vector<double> x;         // size n, current values
  std::vector<double> binv;      // m x m dense inverse of the basis matrix
};

double col_dot(const Tableau& t, const std::vector<double>& rowvec, int j) {
  double s = 0.0;
  if (j < t.n_struct) {
    for (int i = 0; i < t.m; ++i) s += rowvec[i] * t.A[std::size_t(i) * t.n_struct + j];
  } else {
    s = rowvec[j - t.n_struct];
  }
  return s;
}

// binv * column j of A
void ftran(const Tableau& t, const Basis& B, int j, std::vector<double>& out) {
  out.assign(t.m, 0.0);
  if (j < t.n_struct) {
    for (int i = 0; i < t.m; ++i) {
      double s = 0.0;
      const double* brow = &B.binv[std::size_t(i) * t.m];
      for (int k = 0; k < t.m; ++k) {
        double akj = t.A[std::size_t(k) * t.n_struct + j];
        if (akj != 0.0) s += brow[k] * akj;
      }
      out[i] = s;
    }
  } else {
    int k = j - t.n_struct;
    for (int i = 0; i < t.m; ++i) out[i] = B.binv[std::size_t(i) * t.m + k];
  }
}

void recompute_basics(const Tableau& t, Basis& B) {
  // x_B = binv * (b - A_N x_N)
  std::vector<double> rhs = t.b;
  for (int j = 0; j < t.n; ++j) {
    if (B.state[j] == Basic) continue;
    double xj = B.x[j];
    if (xj == 0.0) continue;
    if (j < t.n_struct) {
      for (int i = 0; i < t.m; ++i) rhs[i] -= t.A[std::size_t(i) * t.n_struct + j] * xj;
    } else {
      rhs[j - t.n_struct] -= xj;
    }
  }
  for (int i = 0; i < t.m; ++i) {
    double s = 0.0;
    const double* brow = &B.binv[std::size_t(i) * t.m];
    for (int k = 0; k < t.m; ++k) s += brow[k] * rhs[k];
    B.x[B.basic[i]] = s;
  }
}

bool refactorize(const Tableau& t, Basis& B) {
  // Rebuild binv from scratch by Gauss-Jordan on the basis columns.
  const int m = t.m;
  std::vector<double> mat(std::size_t(m) * (2 * m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < m; ++c) mat[std::size_t(i) * (2 * m) + c] = t.a(i, B.basic[c]);
    mat[std::size_t(i) * (2 * m) + m + i] = 1.0;
  }
  for (int col = 0; col < m; ++col) {
    int piv = -1;
    double best = 1e-11;
    for (int i = col; i < m; ++i) {
      double v = std::abs(mat[std::size_t(i) * (2 * m) + col]);
      if (v > best) { best = v; piv = i; }
    }
    if (piv < 0) return false;
    if (piv != col)
      for (int c = 0; c < 2 * m; ++c) std::swap(mat[std::size_t(piv) * (2 * m) + c], mat[std::size_t(col) * (2 * m) + c]);
    double d = mat[std::size_t(col) * (2 * m) + col];
    for (int c = 0; c < 2 * m; ++c) mat[std::size_t(col) * (2 * m) + c] /= d;
    for (int i = 0; i < m; ++i) {
      if (i == col) continue;
      double f = mat[std::size_t(i) * (2 * m) + col];
      if (f == 0.0) continue;
      for (int c = 0; c < 2 * m; ++c) mat[std::size_t(i) * (2 * m) + c] -= f * mat[std::size_t(col) * (2 * m) + c];
    }
  }
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) B.binv[std::size_t(i) * m + k] = mat[std::size_t(i) * (2 * m) + m + k];
  return true;
}

// One simplex phase over the given cost vector. Returns true if optimal was
// reached, false if unbounded. `phase1` relaxes basic-variable bounds that
// are currently violated (they price toward feasibility).
struct PhaseResult {
  bool optimal = false;
  bool unbounded = false;
  int iterations = 0;
};

double infeas_amount(const Basis& B, const Tableau& t, int j) {
  double v = B.x[j];
  if (v < t.lo[j]) return t.lo[j] - v;
  if (v > t.hi[j]) return v - t.hi[j];
  return 0.0;
}

PhaseResult simplex_phase(const Tableau& t, Basis& B, bool phase1, int max_iter) {
  PhaseResult res;
  int degenerate_streak = 0;
  bool bland = false;
  std::vector<double> y(t.m), col(t.m);

  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;

    // Effective costs: phase 1 minimizes total bound violation of basics.
    std::vector<double> cb(t.m, 0.0);
    if (phase1) {
      for (int i = 0; i < t.m; ++i) {
        int j = B.basic[i];
        if (B.x[j] < t.lo[j] - kFeasTol) cb[i] = 1.0;    // wants to increase
        else if (B.x[j] > t.hi[j] + kFeasTol) cb[i] = -1.0;  // wants to decrease
      }
      bool any = false;
      for (double v : cb) any = any || v != 0.0;
      if (!any) { res.optimal = true; return res; }
    } else {
      for (int i = 0; i < t.m; ++i) cb[i] = t.cost[B.basic[i]];
    }

    // y = cb * binv
    for (int k = 0; k < t.m; ++k) {
      double s = 0.0;
      for (int i = 0; i < t.m; ++i) s += cb[i] * B.binv[std::size_t(i) * t.m + k];
      y[k] = s;
    }

    // Price nonbasic columns. For maximization, entering candidates are
    // at-lower with positive reduced cost or at-upper with negative.
    int enter = -1, dir = 0;
    double best_score = kPivotTol;
    for (int j = 0; j < t.n; ++j) {
      if (B.state[j] == Basic) continue;
      double cj = phase1 ? 0.0 : t.cost[j];
      double rc = cj - col_dot(t, y, j);
      double score = 0.0;
      int d = 0;
      bool at_lo = B.state[j] == AtLower || B.state[j] == FreeZero;
      bool at_hi = B.state[j] == AtUpper || B.state[j] == FreeZero;
      if (at_lo && rc > kPivotTol) { score = rc; d = +1; }
      else if (at_hi && -rc > kPivotTol) { score = -rc; d = -1; }
      if (d == 0) continue;
      if (bland) { enter = j; dir = d; break; }
      if (score > best_score) { best_score = score; enter = j; dir = d; }
    }
    if (enter < 0) {
      if (phase1) return res;  // still infeasible, no improving column
      res.optimal = true;
      return res;
    }

    ftran(t, B, enter, col);

    // Ratio test: entering moves by `dir`; basics move by -dir*col[i].
    double limit = t.hi[enter] - t.lo[enter];  // bound-to-bound flip distance
    int leave = -1;
    double step = limit;
    int leave_to = 0;  // -1: leaving hits lower, +1: hits upper
    for (int i = 0; i < t.m; ++i) {
      double delta = -dir * col[i];
      if (std::abs(delta) < kPivotTol) continue;
      int j = B.basic[i];
      double v = B.x[j];
      double room;
      int to;
      if (delta > 0) {  // basic increases toward its upper bound
        double cap = t.hi[j];
        if (phase1 && v > cap + kFeasTol) cap = kInf;  // already above: moving up is not limiting
        if (phase1 && v < t.lo[j] - kFeasTol) cap = t.lo[j];  // infeasible below: stop at lower bound
        room = (cap == kInf) ? kInf : (cap - v) / delta;
        to = +1;
        if (phase1 && v < t.lo[j] - kFeasTol) to = -1;
      } else {  // basic decreases toward its lower bound
        double cap = t.lo[j];
        if (phase1 && v < cap - kFeasTol) cap = -kInf;
        if (phase1 && v > t.hi[j] + kFeasTol) cap = t.hi[j];
        room = (cap == -kInf) ? kInf : (cap - v) / delta;
        to = -1;
        if (phase1 && v > t.hi[j] + kFeasTol) to = +1;
      }
      if (room < -1e-12) room = 0.0;
      if (room < step - 1e-12 || (bland && room <= step + 1e-12 && (leave < 0 || j < B.basic[leave]))) {
        step = room;
        leave = i;
        leave_to = to;
      }
    }

    if (step == kInf || (leave < 0 && !(std::isfinite(limit)))) {
      if (phase1) fail("lp-internal", "phase-1 column unbounded");
      res.unbounded = true;
      return res;
    }

    if (step <= kFeasTol) ++degenerate_streak; else degenerate_streak = 0;
    if (degenerate_streak > 60) bland = true;  // anti-cycling fallback

    if (leave < 0) {
      // Bound flip: entering moves across its range, basis unchanged.
      B.x[enter] = dir > 0 ? t.hi[enter] : t.lo[enter];
      B.state[enter] = dir > 0 ? AtUpper : AtLower;
      recompute_basics(t, B);
      continue;
    }

    // Pivot: update entering value, move leaving variable to its bound.
    int out = B.basic[leave];
    B.x[enter] = B.x[enter] + dir * step;
    B.state[enter] = Basic;
    B.state[out] = leave_to > 0 ? AtUpper : AtLower;
    if (t.hi[out] == kInf && leave_to > 0) B.state[out] = AtLower;  // safety
    B.x[out] = B.state[out] == AtUpper ? t.hi[out] : t.lo[out];
    if (t.lo[out] == -kInf && B.state[out] == AtLower) { B.state[out] = FreeZero; B.x[out] = 0.0; }
    B.basic[leave] = enter;

    // Update binv by the pivot row transformation.
    double piv = col[leave];
    if (std::abs(piv) < 1e-12) {
      if (!refactorize(t, B)) fail("lp-internal", "singular basis after pivot");
    } else {
      const int m = t.m;
      std::vector<double> prow(&B.binv[std::size_t(leave) * m], &B.binv[std::size_t(leave) * m] + m);
      for (double& v : prow) v /= piv;
      for (int i = 0; i < m; ++i) {
        if (i == leave) continue;
        double f = col[i];
        if (f == 0.0) continue;
        double* row = &B.binv[std::size_t(i) * m];
        for (int k = 0; k < m; ++k) row[k] -= f * prow[k];
      }
      for (int k = 0; k < m; ++k) B.binv[std::size_t(leave) * m + k] = prow[k];
    }
    if ((iter + 1) % 128 == 0) {
      if (!refactorize(t, B)) fail("lp-internal", "basis refactorization failed");
    }
    recompute_basics(t, B);
  }
  fail("lp-internal", "simplex iteration budget exhausted");
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  lp.check_shape();
  const int m = int(lp.rows.size());
  const int ns = int(lp.num_vars());

  Tableau t;
  t.m = m;
  t.n_struct = ns;
  t.n = ns + m;
  t.A.assign(std::size_t(m) * ns, 0.0);
  t.b.resize(m);
  t.lo.resize(t.n);
  t.hi.resize(t.n);
  t.cost.assign(t.n, 0.0);
  for (int j = 0; j < ns; ++j) {
    t.lo[j] = lp.lower[j];
    t.hi[j] = lp.upper[j];
    t.cost[j] = lp.objective[j];
  }
  for (int i = 0; i < m; ++i) {
    const Row& r = lp.rows[i];
    for (int j = 0; j < ns; ++j) t.A[std::size_t(i) * ns + j] = r.coeffs[j];
    t.b[i] = r.rhs;
    int s = ns + i;
    switch (r.sense) {
      case Sense::LessEqual: t.lo[s] = 0.0; t.hi[s] = kInf; break;
      case Sense::Equal: t.lo[s] = 0.0; t.hi[s] = 0.0; break;
      case Sense::GreaterEqual: t.lo[s] = -kInf; t.hi[s] = 0.0; break;
    }
  }

  Basis B;
  B.basic.resize(m);
  B.state.assign(t.n, AtLower);
  B.x.assign(t.n, 0.0);
  B.binv.assign(std::size_t(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    B.basic[i] = ns + i;
    B.binv[std::size_t(i) * m + i] = 1.0;
  }
  for (int j = 0; j < ns; ++j) {
    if (t.lo[j] != -kInf) { B.state[j] = AtLower; B.x[j] = t.lo[j]; }
    else if (t.hi[j] != kInf) { B.state[j] = AtUpper; B.x[j] = t.hi[j]; }
    else { B.state[j] = FreeZero; B.x[j] = 0.0; }
  }
  for (int i = 0; i < m; ++i) B.state[ns + i] = Basic;
  recompute_basics(t, B);

  LpSolution sol;
  int budget = 4000 + 40 * (t.n + t.m);

  // Phase 1: drive basic bound violations to zero.
  double infeas = 0.0;
  for (int i = 0; i < m; ++i) infeas += infeas_amount(B, t, B.basic[i]);
  if (infeas > kFeasTol) {
    PhaseResult p1 = simplex_phase(t, B, true, budget);
    sol.iterations += p1.iterations;
    infeas = 0.0;
    for (int i = 0; i < m; ++i) infeas += infeas_amount(B, t, B.basic[i]);
    if (!p1.optimal || infeas > kFeasTol * (1.0 + std::abs(infeas))) {
      if (infeas > kFeasTol) {
        sol.status = LpStatus::Infeasible;
        return sol;
      }
    }
  }

  PhaseResult p2 = simplex_phase(t, B, false, budget);
  sol.iterations += p2.iterations;
  if (p2.unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x.assign(B.x.begin(), B.x.begin() + ns);
  double obj = 0.0;
  for (int j = 0; j < ns; ++j) obj += lp.objective[j] * sol.x[j];
  sol.objective = obj;

  // Sanity: returned point satisfies every row to the feasibility tolerance.
  for (int i = 0; i < m; ++i) {
    double lhs = 0.0;
    for (int j = 0; j < ns; ++j) lhs += lp.rows[i].coeffs[j] * sol.x[j];
    double scale = std::max(1.0, std::abs(lp.rows[i].rhs));
    double viol = 0.0;
    switch (lp.rows[i].sense) {
      case Sense::LessEqual: viol = lhs - lp.rows[i].rhs; break;
      case Sense::GreaterEqual: viol = lp.rows[i].rhs - lhs; break;
      case Sense::Equal: viol = std::abs(lhs - lp.rows[i].rhs); break;
    }
    if (viol > 1e-6 * scale) fail("lp-internal", "optimal point violates row " + std::to_string(i));
  }
  return sol;
}

std::vector<double> solve_greedy_knapsack(const std::vector<double>& weights,
                                          const std::vector<double>& lower,
                                          const std::vector<double>& upper,
                                          double total) {
  const std::size_t n = weights.size();
  if (lower.size() != n || upper.size() != n)
    fail("knapsack-shape", "bound vectors do not match item count");
  double lo_sum = 0.0, hi_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (lower[k] > upper[k] + 1e-12) fail("knapsack-bounds", "lower above upper at item " + std::to_string(k));
    lo_sum += lower[k];
    hi_sum += upper[k];
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(total));
  if (total < lo_sum - tol || total > hi_sum + tol)
    fail("knapsack-infeasible", "total outside [sum lower, sum upper]");

  std::vector<double> x(lower);
  double remaining = std::min(std::max(total - lo_sum, 0.0), hi_sum - lo_sum);

  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    return a < b;
  });
  for (std::size_t k : order) {
    if (remaining <= 0.0) break;
    double room = upper[k] - x[k];
    double take = std::min(room, remaining);
    x[k] += take;
    remaining -= take;
  }
  return x;
}

CrossCheckReport cross_check(const std::vector<double>& weights,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper, double total) {
  std::vector<double> g = solve_greedy_knapsack(weights, lower, upper, total);
  double gobj = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) gobj += weights[k] * g[k];

  LinearProgram prog;
  prog.objective = weights;
  prog.lower = lower;
  prog.upper = upper;
  Row r;
  r.coeffs.assign(weights.size(), 1.0);
  r.sense = Sense::Equal;
  r.rhs = total;
  prog.rows.push_back(std::move(r));
  LpSolution s = solve_lp(prog);
  if (s.status != LpStatus::Optimal) fail("crosscheck", "simplex failed on knapsack instance");

  CrossCheckReport rep;
  rep.lp_objective = s.objective;
  rep.greedy_objective = gobj;
  rep.relative_error = relative_gap(s.objective, gobj);
  rep.agree = rep.relative_error <= 1e-9;
  if (!rep.agree)
    fail("crosscheck", "greedy and simplex objectives disagree: " + std::to_string(gobj) +
                           " vs " + std::to_string(s.objective));
  return rep;
}

}  // namespace epivax::lp
