#pragma once

// Dense bounded-variable primal simplex for the small structured LPs that
// arise per period, plus a greedy solver for pure weighted-knapsack
// structure. The greedy path is always cross-checkable against the simplex.

#include <limits>
#include <string>
#include <vector>

#include "epivax/common.hpp"

namespace epivax::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-8;

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Row {
  std::vector<double> coeffs;  // dense, one per variable
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

// Maximization problem: max c'x subject to rows, lower <= x <= upper.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<double> lower;  // -inf allowed
  std::vector<double> upper;  // +inf allowed

  std::size_t num_vars() const { return objective.size(); }
  void check_shape() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

const char* to_string(LpStatus s);

// Bounded-variable primal simplex, deterministic for fixed input.
// Dantzig pricing with a Bland fallback once a degeneracy budget is hit.
LpSolution solve_lp(const LinearProgram& lp);

// max sum_k weights[k]*x[k]  s.t.  sum_k x[k] == total, lo <= x <= hi.
// Lower bounds are met first; the remainder is poured in descending weight
// order, ties broken by ascending index. LP-optimal for this structure.
std::vector<double> solve_greedy_knapsack(const std::vector<double>& weights,
                                          const std::vector<double>& lower,
                                          const std::vector<double>& upper,
                                          double total);

struct CrossCheckReport {
  bool agree = false;
  double lp_objective = 0.0;
  double greedy_objective = 0.0;
  double relative_error = 0.0;
};

// Solves the same knapsack instance through both routes and compares
// objective values at 1e-9 relative. Throws on disagreement.
CrossCheckReport cross_check(const std::vector<double>& weights,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper, double total);

}  // namespace epivax::lp
