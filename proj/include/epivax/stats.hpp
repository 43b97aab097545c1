#pragma once

// Paired t-test with a continued-fraction incomplete-beta p-value.

#include <vector>

#include "epivax/common.hpp"

namespace epivax {

struct TTestResult {
  double t = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool degenerate = false;  // zero variance with nonzero mean difference
};

// Two-tailed paired t-test of equal means. Zero difference variance with a
// zero mean gives t = 0, p = 1; with a nonzero mean it is flagged degenerate
// with p = 0.
TTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

// Two-tailed p-value of a t statistic at the given degrees of freedom.
double t_two_tailed_p(double t, int dof);

}  // namespace epivax
