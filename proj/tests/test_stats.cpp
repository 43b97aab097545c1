#include <doctest.h>

#include <cmath>

#include "epivax/stats.hpp"

using namespace epivax;

TEST_CASE("identical series give t of zero and p of one") {
  std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  TTestResult r = paired_t_test(a, a);
  CHECK(r.t == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("constant nonzero differences are flagged degenerate with p of zero") {
  std::vector<double> a{2.0, 3.0, 4.0, 5.0};
  std::vector<double> b{1.0, 2.0, 3.0, 4.0};
  TTestResult r = paired_t_test(a, b);
  CHECK(r.degenerate);
  CHECK(r.p_value == 0.0);
}

TEST_CASE("zero-mean differences give an exactly zero statistic") {
  std::vector<double> a{1.0, -1.0, 2.0, -2.0, 0.0};
  std::vector<double> b(5, 0.0);
  TTestResult r = paired_t_test(a, b);
  CHECK(r.t == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("swapping the series negates t and preserves p") {
  std::vector<double> a{1.2, 3.4, 2.2, 5.1, 4.4};
  std::vector<double> b{1.0, 2.9, 2.8, 4.0, 4.1};
  TTestResult ab = paired_t_test(a, b);
  TTestResult ba = paired_t_test(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t));
  CHECK(ab.p_value == doctest::Approx(ba.p_value));
}

TEST_CASE("p-values match reference values of the t distribution") {
  // Two-sided p for t=2.0 with 10 dof is 0.07339; for t=1.0, 5 dof 0.36322.
  CHECK(t_two_tailed_p(2.0, 10) == doctest::Approx(0.0733879).epsilon(1e-5));
  CHECK(t_two_tailed_p(1.0, 5) == doctest::Approx(0.3632175).epsilon(1e-5));
  CHECK(t_two_tailed_p(0.0, 7) == doctest::Approx(1.0));
}

TEST_CASE("incomplete beta agrees with closed forms") {
  // I_x(1, 1) = x; I_x(1, b) = 1 - (1-x)^b.
  for (double x : {0.1, 0.37, 0.5, 0.82}) {
    CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
    CHECK(incomplete_beta(1.0, 3.0, x) ==
          doctest::Approx(1.0 - std::pow(1.0 - x, 3.0)).epsilon(1e-12));
  }
  CHECK(incomplete_beta(2.5, 1.5, 0.0) == 0.0);
  CHECK(incomplete_beta(2.5, 1.5, 1.0) == 1.0);
}

TEST_CASE("short series are rejected") {
  CHECK_THROWS_AS(paired_t_test({1.0}, {2.0}), Error);
  CHECK_THROWS_AS(paired_t_test({1.0, 2.0}, {2.0}), Error);
}
