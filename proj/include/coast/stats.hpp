#pragma once

#include <cstdint>
#include <vector>

namespace coast::stats {

enum class test_kind : int { paired_t, two_prop_z, spearman, pearson };

struct TestResult {
  double statistic = 0.0;  // t, z, rho, or r depending on kind
  double p_value = 1.0;    // two-sided
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;  // second group size where applicable
  test_kind kind = test_kind::paired_t;
};

// Standard normal CDF via erfc (absolute error well under 1e-12).
double normal_cdf(double x);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with `dof` degrees of freedom.
double student_t_two_sided(double t, double dof);

// t-test on paired differences x - y.
TestResult paired_t(const std::vector<double>& x, const std::vector<double>& y);

// Pooled two-proportion z-test; statistic is signed (p2 - p1).
TestResult two_prop_z(std::int64_t s1, std::int64_t n1, std::int64_t s2, std::int64_t n2);

// Rank correlation with average ranks for ties; p via the t-approximation.
TestResult spearman(const std::vector<double>& x, const std::vector<double>& y);

TestResult pearson(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> average_ranks(const std::vector<double>& v);

}  // namespace coast::stats
