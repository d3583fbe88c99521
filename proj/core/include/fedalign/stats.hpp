#pragma once

#include <span>

namespace fedalign {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
/// (modified Lentz), accurate to about 1e-12 for moderate a, b.
double incomplete_beta(double a, double b, double x);

/// Student-t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-tailed
  double df = 0.0;
};

/// Paired two-tailed t-test on d = a - b. Throws length_mismatch when the
/// inputs differ in length or have fewer than two pairs, and
/// degenerate_differences when every difference is identical.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
/// Sample (n-1) standard deviation; 0 for fewer than two values.
double sample_std(std::span<const double> xs);

}  // namespace fedalign
