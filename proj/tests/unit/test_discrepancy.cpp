#include <random>

#include <gtest/gtest.h>

#include "dbf/datagen.hpp"
#include "dbf/discrepancy.hpp"
#include "dbf/trs.hpp"
#include "oracles/oracles.hpp"

namespace dbf {
namespace {

RegressionDataset random_data(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> n01;
  Matrix x(n, m);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) x(i, j) = n01(rng);
    y[i] = n01(rng);
  }
  return RegressionDataset(x, y, static_cast<std::size_t>(m));
}

TEST(TargetProxy, Examples) {
  const TargetProxy p = target_proxy(5, 2);
  EXPECT_EQ(p.p.values(), (Vector(5) << 0, 0, 0, 0.5, 0.5).finished());
  EXPECT_TRUE(target_proxy(3, 3).p.values().isApprox(Vector::Constant(3, 1.0 / 3.0)));
  try {
    target_proxy(2, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBadWindow);
  }
  EXPECT_THROW(target_proxy(4, 0), Error);
}

TEST(InstantDiscrepancy, IdenticalRowsGiveZero) {
  Matrix x(4, 2);
  x.rowwise() = (Eigen::RowVector2d() << 0.5, -1.0).finished();
  const RegressionDataset data(x, Vector::Constant(4, 0.3), 2);
  const auto d = instantaneous_discrepancies(data, KernelSpec::linear(), BallConstraint(1.5), target_proxy(4, 2));
  EXPECT_LE(d.d.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InstantDiscrepancy, OneDimensionalGridOracle) {
  Matrix x(2, 1);
  x << 1, 1;
  const RegressionDataset data(x, (Vector(2) << 0, 1).finished(), 1);
  const auto d = instantaneous_discrepancies(data, KernelSpec::linear(), BallConstraint(1.0), target_proxy(2, 2));
  for (int t = 0; t < 2; ++t) {
    double best = 0.0;
    for (int k = -10000; k <= 10000; ++k) {
      const double w = k * 1e-4;
      const double a = 0.5 * (w * w) + 0.5 * (w - 1) * (w - 1);
      const double lt = (w - data.targets[t]) * (w - data.targets[t]);
      best = std::max(best, std::abs(a - lt));
    }
    EXPECT_NEAR(d.d[t], best, 1e-3);
  }
}

TEST(InstantDiscrepancy, FullWindowMakesAllEqual) {
  std::mt19937_64 rng(1);
  const RegressionDataset data = random_data(rng, 7, 2);
  const auto d =
      instantaneous_discrepancies(data, KernelSpec::linear(), BallConstraint(1.0), target_proxy(7, 7), 20);
  for (Eigen::Index t = 1; t < 7; ++t) EXPECT_NEAR(d.d[t], d.d[0], 1e-10);
  EXPECT_LE(d.d.maxCoeff(), 1e-10);
}

TEST(InstantDiscrepancy, NonNegativeAndRotationInvariant) {
  std::mt19937_64 rng(2);
  const RegressionDataset data = random_data(rng, 10, 3);
  const Matrix q = Eigen::HouseholderQR<Matrix>(oracle::random_symmetric(rng, 3)).householderQ();
  const RegressionDataset rotated(data.features * q, data.targets, 3);
  const auto d = instantaneous_discrepancies(data, KernelSpec::linear(), BallConstraint(0.8), target_proxy(10, 4));
  const auto dr = instantaneous_discrepancies(rotated, KernelSpec::linear(), BallConstraint(0.8), target_proxy(10, 4));
  EXPECT_GE(d.d.minCoeff(), 0.0);
  EXPECT_LE((d.d - dr.d).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(InstantDiscrepancy, KernelPathMatchesExplicitFeatureMap) {
  // poly:2:0 on scalar inputs has the explicit feature map x -> x^2.
  std::mt19937_64 rng(3);
  const RegressionDataset data = random_data(rng, 8, 1);
  Matrix mapped = data.features.array().square().matrix();
  const RegressionDataset explicit_data(mapped, data.targets, 1);
  const auto dk =
      instantaneous_discrepancies(data, KernelSpec::polynomial(2, 0.0), BallConstraint(1.2), target_proxy(8, 3));
  const auto dl =
      instantaneous_discrepancies(explicit_data, KernelSpec::linear(), BallConstraint(1.2), target_proxy(8, 3));
  EXPECT_LE((dk.d - dl.d).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(EmpiricalDiscrepancy, ZeroWhenQEqualsProxy) {
  std::mt19937_64 rng(4);
  const RegressionDataset data = random_data(rng, 9, 2);
  const TargetProxy proxy = target_proxy(9, 3);
  EXPECT_EQ(empirical_discrepancy(data, KernelSpec::linear(), BallConstraint(1.0), proxy.p, proxy), 0.0);
}

TEST(EmpiricalDiscrepancy, ZeroWeightsMatchTopEigenvalue) {
  std::mt19937_64 rng(5);
  RegressionDataset data = random_data(rng, 6, 3);
  data = data.with_targets(Vector::Zero(6));
  const TargetProxy proxy = target_proxy(6, 6);
  const WeightVector q(Vector::Zero(6));
  const double radius = 1.7;
  // Power iteration on sum_t p_t x_t x_t^T.
  const Matrix s = data.features.transpose() * proxy.p.values().asDiagonal() * data.features;
  Vector v = Vector::Ones(3);
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    const Vector next = s * v;
    lambda = next.norm() / v.norm();
    v = next.normalized();
  }
  EXPECT_NEAR(empirical_discrepancy(data, KernelSpec::linear(), BallConstraint(radius), q, proxy),
              radius * radius * lambda, 1e-9);
}

TEST(EmpiricalDiscrepancy, PolarGridOracle) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const RegressionDataset data = random_data(rng, 6, 2);
  Vector qv(6);
  for (int t = 0; t < 6; ++t) qv[t] = u01(rng);
  qv /= qv.sum();
  const WeightVector q(qv, true);
  const TargetProxy proxy = target_proxy(6, 2);
  const double radius = 1.0;
  const double got = empirical_discrepancy(data, KernelSpec::linear(), BallConstraint(radius), q, proxy);
  const Vector delta = proxy.p.values() - qv;
  double best = -1e300;
  for (int i = 0; i <= 400; ++i) {
    const double rho = radius * i / 400.0;
    for (int k = 0; k < 2000; ++k) {
      const double th = 2.0 * M_PI * k / 2000.0;
      const Eigen::Vector2d w(rho * std::cos(th), rho * std::sin(th));
      const Vector r = data.features * w - data.targets;
      best = std::max(best, delta.dot(r.cwiseProduct(r)));
    }
  }
  EXPECT_NEAR(got, best, 1e-3);
  EXPECT_GE(got, delta.dot(data.targets.cwiseProduct(data.targets)) - 1e-12);
}

TEST(EmpiricalDiscrepancy, BoundedByWeightedInstantaneous) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const RegressionDataset data = random_data(rng, 8, 2);
    const TargetProxy uniform_proxy = target_proxy(8, 8);
    Vector qv(8);
    for (int t = 0; t < 8; ++t) qv[t] = u01(rng);
    qv /= qv.sum();
    const WeightVector q(qv, true);
    const auto d =
        instantaneous_discrepancies(data, KernelSpec::linear(), BallConstraint(1.0), uniform_proxy);
    const double disc = empirical_discrepancy(data, KernelSpec::linear(), BallConstraint(1.0), q, uniform_proxy);
    EXPECT_LE(disc, qv.dot(d.d) + 1e-9);
  }
}

TEST(UpperBound, Examples) {
  const InstantDiscrepancies d{(Vector(3) << 0.5, 1.0, 2.0).finished(), 0};
  const WeightVector v = WeightVector::uniform(3);
  EXPECT_NEAR(upper_bound_discrepancy(d, v, v, 7.0, 1.0), (0.5 + 1.0 + 2.0) / 3.0, 1e-15);
  const WeightVector q((Vector(3) << 0.2, 0.3, 0.5).finished(), true);
  const InstantDiscrepancies zero{Vector::Zero(3), 0};
  const double l1 = std::abs(0.2 - 1.0 / 3) + std::abs(0.3 - 1.0 / 3) + std::abs(0.5 - 1.0 / 3);
  EXPECT_NEAR(upper_bound_discrepancy(zero, q, v, 2.0, 1.0), 2.0 * l1, 1e-15);
  // 0.2*0.5 + 0.3*1 + 0.5*2 = 1.4 plus 0.5 * l1.
  EXPECT_NEAR(upper_bound_discrepancy(d, q, v, 0.5, 1.0), 1.4 + 0.5 * l1, 1e-15);
  EXPECT_THROW(upper_bound_discrepancy(d, WeightVector::uniform(2), v, 1.0, 1.0), Error);
}

TEST(Markov, ConstrainedSimplexGivesZero) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const int states = 3 + static_cast<int>(seed);
    const double p = 0.15 * static_cast<double>(seed);
    const MarkovChainSpec spec{states, p, MarkovFamily::kConstrained, 10.0};
    const std::vector<int> path = generate_markov(states, p, 40, seed);
    const WeightVector q = WeightVector::uniform(path.size() - 1);
    EXPECT_LE(markov_discrepancy_oracle(spec, path, q), 1e-6) << "seed " << seed;
  }
}

TEST(Markov, ConstrainedValueIsPathIndependent) {
  const MarkovChainSpec spec{5, 0.3, MarkovFamily::kConstrained, 10.0};
  std::vector<double> values;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::vector<int> path = generate_markov(5, 0.3, 30, seed);
    Vector q = Vector::Constant(29, 2.0 / 29.0);
    values.push_back(markov_discrepancy_oracle(spec, path, WeightVector(q)));
  }
  for (double v : values) EXPECT_NEAR(v, values.front(), 1e-9);
}

TEST(Markov, ConstrainedDoubledWeightsMatchOneDimensionalGrid) {
  // With q summing to 2 the objective is -(p|a-b-1| + (1-p)|a-b+1|) over a - b in [-1, 1].
  const double p = 0.3;
  const MarkovChainSpec spec{4, p, MarkovFamily::kConstrained, 10.0};
  const std::vector<int> path = generate_markov(4, p, 25, 9);
  const Vector q = Vector::Constant(24, 2.0 / 24.0);
  double best = -1e300;
  for (int k = 0; k <= 2000; ++k) {
    const double diff = -1.0 + k * 1e-3;
    best = std::max(best, -(p * std::abs(diff - 1.0) + (1.0 - p) * std::abs(diff + 1.0)));
  }
  EXPECT_NEAR(markov_discrepancy_oracle(spec, path, WeightVector(q)), best, 1e-9);
}

TEST(Markov, UnconstrainedGridRefinement) {
  const MarkovChainSpec spec{5, 0.4, MarkovFamily::kUnconstrained, 2.0};
  const std::vector<int> path = generate_markov(5, 0.4, 30, 4);
  const WeightVector q = WeightVector::uniform(path.size() - 1);
  const double coarse = markov_discrepancy_oracle(spec, path, q, 1e-2);
  const double fine = markov_discrepancy_oracle(spec, path, q, 2e-3);
  EXPECT_GE(fine, 0.0);
  EXPECT_NEAR(coarse, fine, 1e-1 * std::max(1.0, fine));
  EXPECT_GE(fine, coarse - 1e-12);
}

}  // namespace
}  // namespace dbf
