#pragma once

#include <cstddef>
#include <vector>

#include "dbf/core.hpp"
#include "dbf/kernels.hpp"
#include "dbf/trs.hpp"

namespace dbf {

/// Uniform weights over the last s points, standing in for the
/// (unobservable) distribution at the forecast time.
struct TargetProxy {
  WeightVector p;
  std::size_t s = 0;
};

TargetProxy target_proxy(std::size_t length, std::size_t s);

struct InstantDiscrepancies {
  Vector d;
  std::size_t window = 0;  // 0 = pointwise
};

/// d_t = sup_{||w|| <= radius} |a(w) - loss_t(w)| where a(w) is the
/// proxy-weighted squared loss and loss_t is the loss at t (or the average
/// over the clipped window [t - l, t + l]).
InstantDiscrepancies instantaneous_discrepancies(const RegressionDataset& data, const KernelSpec& kernel,
                                                 const BallConstraint& ball, const TargetProxy& proxy,
                                                 std::size_t window = 0);

/// Same computation on an already factorized sample.
InstantDiscrepancies instantaneous_discrepancies(const FeatureMatrix& features, const Vector& targets,
                                                 const BallConstraint& ball, const TargetProxy& proxy,
                                                 std::size_t window = 0);

/// sup_{||w|| <= radius} sum_t (p_t - q_t) (w . phi_t - y_t)^2; no absolute value.
double empirical_discrepancy(const RegressionDataset& data, const KernelSpec& kernel, const BallConstraint& ball,
                             const WeightVector& q, const TargetProxy& proxy);

double empirical_discrepancy(const FeatureMatrix& features, const Vector& targets, const BallConstraint& ball,
                             const WeightVector& q, const TargetProxy& proxy);

/// sum_t q_t d_t + lambda2 * ||q - v||_p
double upper_bound_discrepancy(const InstantDiscrepancies& d, const WeightVector& q, const WeightVector& v,
                               double lambda2, double norm_p);

// --- Markov chain example -------------------------------------------------

enum class MarkovFamily {
  kConstrained,    // x -> a(x-1) + b(x+1), a + b = 1, a, b >= 0
  kUnconstrained,  // a, b in [0, bound]
};

struct MarkovChainSpec {
  int states = 2;
  double p_left = 0.5;  // P(X_t = X_{t-1} - 1 mod N)
  MarkovFamily family = MarkovFamily::kConstrained;
  double bound = 10.0;
};

/// E[|h(X_{t-1}) - X_t| | X_{t-1} = x] for h(x) = a(x-1) + b(x+1), with the
/// next state taken as x - 1 or x + 1 (no wrap-around).
double markov_conditional_loss(const MarkovChainSpec& spec, double a, double b, int x);

/// Grid evaluation of sup_{(a,b)} E[loss at T+1 | path] - sum_t q_t E[loss_t | X_{t-1}].
/// `path` holds X_0..X_T, so q has path.size() - 1 entries.
double markov_discrepancy_oracle(const MarkovChainSpec& spec, const std::vector<int>& path, const WeightVector& q,
                                 double grid_step = 1e-3);

}  // namespace dbf
