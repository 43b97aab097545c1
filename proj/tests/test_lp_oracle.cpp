#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "epivax/common.hpp"
#include "epivax/lp.hpp"

using namespace epivax;
using namespace epivax::lp;

namespace {

// Independent reference for small LPs: enumerate candidate vertices as
// intersections of n tight constraints drawn from rows and bounds, keep the
// feasible ones, and take the best objective. Exponential, fine for n <= 3.
struct TinyLpOracle {
  const LinearProgram& lp;
  int n;
  std::vector<std::vector<double>> normals;  // one per tightenable constraint
  std::vector<double> offsets;

  explicit TinyLpOracle(const LinearProgram& prog) : lp(prog), n(int(prog.num_vars())) {
    for (const Row& r : lp.rows) {
      normals.push_back(r.coeffs);
      offsets.push_back(r.rhs);
    }
    for (int j = 0; j < n; ++j) {
      std::vector<double> e(n, 0.0);
      e[j] = 1.0;
      if (std::isfinite(lp.lower[j])) {
        normals.push_back(e);
        offsets.push_back(lp.lower[j]);
      }
      if (std::isfinite(lp.upper[j])) {
        normals.push_back(e);
        offsets.push_back(lp.upper[j]);
      }
    }
  }

  bool feasible(const std::vector<double>& x) const {
    for (int j = 0; j < n; ++j) {
      if (x[j] < lp.lower[j] - 1e-7) return false;
      if (x[j] > lp.upper[j] + 1e-7) return false;
    }
    for (const Row& r : lp.rows) {
      double lhs = 0.0;
      for (int j = 0; j < n; ++j) lhs += r.coeffs[j] * x[j];
      switch (r.sense) {
        case Sense::LessEqual:
          if (lhs > r.rhs + 1e-7) return false;
          break;
        case Sense::GreaterEqual:
          if (lhs < r.rhs - 1e-7) return false;
          break;
        case Sense::Equal:
          if (std::abs(lhs - r.rhs) > 1e-7) return false;
          break;
      }
    }
    return true;
  }

  // Solve the n x n system formed by the chosen tight constraints.
  bool solve_square(const std::vector<int>& pick, std::vector<double>& x) const {
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) a[r][c] = normals[pick[r]][c];
      a[r][n] = offsets[pick[r]];
    }
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r)
        if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
      if (std::abs(a[piv][col]) < 1e-10) return false;
      std::swap(a[piv], a[col]);
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        double f = a[r][col] / a[col][col];
        for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
      }
    }
    x.assign(n, 0.0);
    for (int r = 0; r < n; ++r) x[r] = a[r][n] / a[r][r];
    return true;
  }

  // Returns the best vertex objective, or nothing when no vertex is feasible.
  bool best(double& value) const {
    const int m = int(normals.size());
    if (m < n) return false;
    bool found = false;
    std::vector<int> pick(n);
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == n) {
        std::vector<double> x;
        if (!solve_square(pick, x)) return;
        if (!feasible(x)) return;
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += lp.objective[j] * x[j];
        if (!found || v > value) {
          value = v;
          found = true;
        }
        return;
      }
      for (int i = start; i < m; ++i) {
        pick[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
    return found;
  }
};

}  // namespace

TEST_CASE("the simplex matches vertex enumeration on random small instances") {
  Rng rng(987654321);
  int solved = 0;
  for (int trial = 0; trial < 400; ++trial) {
    int n = rng.uniform_int(1, 3);
    int m = rng.uniform_int(1, 4);
    LinearProgram prog;
    prog.objective.resize(n);
    prog.lower.assign(n, 0.0);
    prog.upper.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      prog.objective[j] = rng.uniform(-3.0, 3.0);
      prog.lower[j] = rng.uniform(-2.0, 1.0);
      prog.upper[j] = prog.lower[j] + rng.uniform(0.0, 6.0);
    }
    for (int i = 0; i < m; ++i) {
      Row r;
      r.coeffs.resize(n);
      for (double& v : r.coeffs) v = rng.uniform(-2.0, 2.0);
      double roll = rng.uniform();
      r.sense = roll < 0.6 ? Sense::LessEqual : (roll < 0.85 ? Sense::GreaterEqual : Sense::Equal);
      r.rhs = rng.uniform(-4.0, 6.0);
      prog.rows.push_back(std::move(r));
    }

    TinyLpOracle oracle(prog);
    double ref = 0.0;
    bool ref_found = oracle.best(ref);
    LpSolution sol = solve_lp(prog);

    if (sol.status == LpStatus::Optimal) {
      // Bounded boxes force boundedness, so an optimum must sit on a vertex.
      REQUIRE(ref_found);
      CHECK(relative_gap(sol.objective, ref) <= 1e-7);
      ++solved;
    } else {
      CHECK(sol.status == LpStatus::Infeasible);
      CHECK_FALSE(ref_found);
    }
  }
  CHECK(solved > 150);  // the generator must produce plenty of solvable cases
}
