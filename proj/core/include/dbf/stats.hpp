#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dbf {

double mse(std::span<const double> predictions, std::span<const double> truth);

/// Prefix means: out[k] = mean(values[0..k]).
std::vector<double> running_mse(std::span<const double> squared_errors);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

/// I_x(a, b) via the continued fraction (modified Lentz), using the symmetry
/// I_x(a, b) = 1 - I_{1-x}(b, a) where the fraction converges slowly.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double dof);

enum class Alternative { kLess, kGreater };

struct TTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double mean_difference = 0.0;
  std::size_t n = 0;
};

/// One-sided paired t-test on d_i = a_i - b_i; kLess tests mean(d) < 0.
/// Zero-variance differences with non-zero mean give t = +-inf (p = 0 or 1);
/// identical samples throw DegenerateSample.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                          Alternative alternative = Alternative::kLess);

}  // namespace dbf
