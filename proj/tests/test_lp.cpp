#include <doctest.h>

#include "epivax/common.hpp"
#include "epivax/lp.hpp"

using namespace epivax;
using namespace epivax::lp;

namespace {

LinearProgram make_lp(std::vector<double> c, std::vector<double> lo, std::vector<double> hi) {
  LinearProgram prog;
  prog.objective = std::move(c);
  prog.lower = std::move(lo);
  prog.upper = std::move(hi);
  return prog;
}

void add_row(LinearProgram& prog, std::vector<double> a, Sense s, double rhs) {
  Row r;
  r.coeffs = std::move(a);
  r.sense = s;
  r.rhs = rhs;
  prog.rows.push_back(std::move(r));
}

}  // namespace

TEST_CASE("simplex solves a single bounded variable") {
  LinearProgram prog = make_lp({1.0}, {0.0}, {kInf});
  add_row(prog, {1.0}, Sense::LessEqual, 5.0);
  LpSolution s = solve_lp(prog);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(5.0));
  CHECK(s.objective == doctest::Approx(5.0));
}

TEST_CASE("simplex solves the hand-checked two-variable instance") {
  // max 3x + 2y st x + y <= 4, x <= 2 -> (2,2) with objective 10
  LinearProgram prog = make_lp({3.0, 2.0}, {0.0, 0.0}, {kInf, kInf});
  add_row(prog, {1.0, 1.0}, Sense::LessEqual, 4.0);
  add_row(prog, {1.0, 0.0}, Sense::LessEqual, 2.0);
  LpSolution s = solve_lp(prog);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(2.0));
  CHECK(s.x[1] == doctest::Approx(2.0));
  CHECK(s.objective == doctest::Approx(10.0));
}

TEST_CASE("simplex reports conflicting rows as infeasible") {
  LinearProgram prog = make_lp({1.0}, {0.0}, {kInf});
  add_row(prog, {1.0}, Sense::GreaterEqual, 1.0);
  add_row(prog, {1.0}, Sense::LessEqual, 0.0);
  CHECK(solve_lp(prog).status == LpStatus::Infeasible);
}

TEST_CASE("simplex reports an uncapped improving ray as unbounded") {
  LinearProgram prog = make_lp({1.0, 1.0}, {0.0, 0.0}, {kInf, kInf});
  add_row(prog, {1.0, -1.0}, Sense::LessEqual, 1.0);
  CHECK(solve_lp(prog).status == LpStatus::Unbounded);
}

TEST_CASE("simplex honors equality rows and negative lower bounds") {
  // max x - y st x + y == 2, -3 <= y <= 1
  LinearProgram prog = make_lp({1.0, -1.0}, {0.0, -3.0}, {kInf, 1.0});
  add_row(prog, {1.0, 1.0}, Sense::Equal, 2.0);
  LpSolution s = solve_lp(prog);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[1] == doctest::Approx(-3.0));
  CHECK(s.x[0] == doctest::Approx(5.0));
}

TEST_CASE("greedy knapsack fills by weight with index tie-break") {
  CHECK(solve_greedy_knapsack({3.0, 1.0}, {0.0, 0.0}, {10.0, 10.0}, 10.0) ==
        std::vector<double>{10.0, 0.0});
  CHECK(solve_greedy_knapsack({1.0, 1.0}, {2.0, 2.0}, {2.0, 2.0}, 4.0) ==
        std::vector<double>{2.0, 2.0});
  CHECK(solve_greedy_knapsack({1.0, 1.0}, {0.0, 0.0}, {4.0, 4.0}, 6.0) ==
        std::vector<double>{4.0, 2.0});
}

TEST_CASE("greedy knapsack rejects totals outside the bound box") {
  CHECK_THROWS_AS(solve_greedy_knapsack({1.0}, {2.0}, {4.0}, 1.0), Error);
  CHECK_THROWS_AS(solve_greedy_knapsack({1.0}, {0.0}, {4.0}, 5.0), Error);
}

TEST_CASE("greedy and simplex agree on random knapsack instances") {
  Rng rng(20260809);
  for (int trial = 0; trial < 300; ++trial) {
    int n = rng.uniform_int(1, 8);
    std::vector<double> w(n), lo(n), hi(n);
    double lo_sum = 0.0, hi_sum = 0.0;
    for (int k = 0; k < n; ++k) {
      w[k] = rng.uniform(0.0, 5.0);
      lo[k] = rng.uniform(0.0, 3.0);
      hi[k] = lo[k] + rng.uniform(0.0, 7.0);
      lo_sum += lo[k];
      hi_sum += hi[k];
    }
    double total = lo_sum + (hi_sum - lo_sum) * rng.uniform();
    CrossCheckReport rep = cross_check(w, lo, hi, total);
    CHECK(rep.agree);
  }
}

TEST_CASE("cross-check passes with binding lower bounds and equal weights") {
  CHECK(cross_check({2.0, 2.0, 2.0}, {1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, 3.0).agree);
  CHECK(cross_check({1.5, 0.5}, {2.0, 3.0}, {6.0, 4.0}, 5.0).agree);
}

TEST_CASE("optimal value is invariant under variable permutation") {
  // A second route to the same optimum certifies the termination rule on
  // randomly generated feasible instances.
  Rng rng(31337);
  for (int trial = 0; trial < 120; ++trial) {
    int n = rng.uniform_int(2, 6), m = rng.uniform_int(1, 5);
    LinearProgram prog = make_lp(std::vector<double>(n), std::vector<double>(n, 0.0),
                                 std::vector<double>(n));
    for (int j = 0; j < n; ++j) {
      prog.objective[j] = rng.uniform(-2.0, 5.0);
      prog.upper[j] = rng.uniform(0.5, 8.0);
    }
    for (int i = 0; i < m; ++i) {
      std::vector<double> a(n);
      double amax = 0.0;
      for (double& v : a) {
        v = rng.uniform(0.0, 3.0);
        amax += v;
      }
      add_row(prog, std::move(a), Sense::LessEqual, rng.uniform(0.1, amax * 4.0));
    }
    LpSolution base = solve_lp(prog);
    REQUIRE(base.status == LpStatus::Optimal);

    LinearProgram reversed = prog;
    for (int j = 0; j < n; ++j) {
      reversed.objective[j] = prog.objective[n - 1 - j];
      reversed.upper[j] = prog.upper[n - 1 - j];
      for (std::size_t r = 0; r < prog.rows.size(); ++r)
        reversed.rows[r].coeffs[j] = prog.rows[r].coeffs[n - 1 - j];
    }
    LpSolution flipped = solve_lp(reversed);
    REQUIRE(flipped.status == LpStatus::Optimal);
    CHECK(relative_gap(base.objective, flipped.objective) <= 1e-8);
  }
}

TEST_CASE("simplex is deterministic") {
  LinearProgram prog = make_lp({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, {5.0, 5.0, 5.0});
  add_row(prog, {1.0, 1.0, 1.0}, Sense::LessEqual, 7.0);
  LpSolution a = solve_lp(prog);
  LpSolution b = solve_lp(prog);
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.x == b.x);
  CHECK(a.objective == b.objective);
}
