#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "dbf/error.hpp"
#include "dbf/stats.hpp"
#include "oracles/oracles.hpp"

namespace dbf {
namespace {

TEST(Stats, MseAndRunningMse) {
  EXPECT_DOUBLE_EQ(mse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 0, 6}), 13.0 / 3.0);
  EXPECT_EQ(running_mse(std::vector<double>{4, 2, 0}), (std::vector<double>{4, 3, 2}));
  EXPECT_THROW(mse(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST(Stats, MeanAndStddev) {
  EXPECT_DOUBLE_EQ(mean(std::vector<double>{1, 2, 3, 6}), 3.0);
  EXPECT_DOUBLE_EQ(sample_stddev(std::vector<double>{1, 3}), std::sqrt(2.0));
  EXPECT_EQ(sample_stddev(std::vector<double>{5}), 0.0);
}

TEST(Stats, IncompleteBetaIdentities) {
  EXPECT_NEAR(regularized_incomplete_beta(1, 1, 0.3), 0.3, 1e-14);
  EXPECT_NEAR(regularized_incomplete_beta(2, 1, 0.3), 0.09, 1e-14);
  EXPECT_NEAR(regularized_incomplete_beta(1, 3, 0.2), 1 - std::pow(0.8, 3), 1e-14);
  for (double x : {0.05, 0.4, 0.77}) {
    EXPECT_NEAR(regularized_incomplete_beta(2.5, 4.0, x) + regularized_incomplete_beta(4.0, 2.5, 1 - x), 1.0, 1e-13);
  }
  EXPECT_EQ(regularized_incomplete_beta(3, 2, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(3, 2, 1.0), 1.0);
}

TEST(Stats, StudentCdfMatchesQuadrature) {
  for (double dof : {1.0, 3.0, 9.0, 30.0}) {
    for (double t : {-3.0, -0.7, 0.0, 1.2, 4.0}) {
      EXPECT_NEAR(student_t_cdf(t, dof), oracle::student_t_cdf_by_quadrature(t, dof), 1e-8) << t << " " << dof;
    }
  }
  // Cauchy closed form.
  EXPECT_NEAR(student_t_cdf(1.0, 1.0), 0.75, 1e-14);
}

TEST(Stats, PairedTestDirection) {
  const std::vector<double> a{1.0, 1.1, 0.9, 1.2, 1.0};
  const std::vector<double> b{2.0, 2.3, 1.8, 2.1, 2.2};
  EXPECT_LT(paired_t_test(a, b, Alternative::kLess).p_value, 0.01);
  EXPECT_GT(paired_t_test(a, b, Alternative::kGreater).p_value, 0.99);
  EXPECT_LT(paired_t_test(b, a, Alternative::kGreater).p_value, 0.01);
}

TEST(Stats, PairedTestPValueMatchesOracle) {
  const std::vector<double> a{0.31, 0.12, 0.55, 0.40, 0.28, 0.19, 0.62, 0.33, 0.47, 0.25};
  const std::vector<double> b{0.35, 0.10, 0.61, 0.49, 0.30, 0.24, 0.60, 0.41, 0.52, 0.26};
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double t = mean(d) / (sample_stddev(d) / std::sqrt(10.0));
  const TTestResult r = paired_t_test(a, b, Alternative::kLess);
  EXPECT_NEAR(r.statistic, t, 1e-12);
  EXPECT_EQ(r.n, 10u);
  EXPECT_NEAR(r.p_value, oracle::student_t_cdf_by_quadrature(t, 9.0), 1e-6);
}

TEST(Stats, ZeroVarianceDifferences) {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{2, 3, 4};
  const TTestResult r = paired_t_test(a, b, Alternative::kLess);
  EXPECT_EQ(r.statistic, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(r.p_value, 0.0);
  try {
    paired_t_test(a, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateSample);
  }
  EXPECT_THROW(paired_t_test(std::vector<double>{1}, std::vector<double>{2}), Error);
}

}  // namespace
}  // namespace dbf
