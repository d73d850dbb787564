#include "dbf/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>
#include <string>

namespace dbf {

TargetProxy target_proxy(std::size_t length, std::size_t s) {
  if (s == 0 || s > length) {
    fail(ErrorKind::kBadWindow, "proxy window s=" + std::to_string(s) + " invalid for length " +
                                    std::to_string(length));
  }
  Vector p = Vector::Zero(static_cast<Eigen::Index>(length));
  p.tail(static_cast<Eigen::Index>(s)).setConstant(1.0 / static_cast<double>(s));
  return {WeightVector(std::move(p), true), s};
}

namespace {

struct Moments {
  Matrix second;  // sum w phi phi^T
  Vector cross;   // sum w y phi
  double energy = 0.0;  // sum w y^2
};

Moments weighted_moments(const Matrix& phi, const Vector& y, const Vector& weights) {
  Moments m;
  m.second = phi.transpose() * weights.asDiagonal() * phi;
  m.cross = phi.transpose() * (weights.array() * y.array()).matrix();
  m.energy = (weights.array() * y.array().square()).sum();
  return m;
}

// Quadratic in w of sum_t weights_t (w.phi_t - y_t)^2.
QuadraticForm loss_form(const Moments& m) {
  Matrix a = 0.5 * (m.second + m.second.transpose());
  return QuadraticForm(std::move(a), -2.0 * m.cross, m.energy);
}

}  // namespace

InstantDiscrepancies instantaneous_discrepancies(const FeatureMatrix& features, const Vector& targets,
                                                 const BallConstraint& ball, const TargetProxy& proxy,
                                                 std::size_t window) {
  const Matrix& phi = features.phi;
  const Eigen::Index n = phi.rows();
  require(targets.size() == n, ErrorKind::kLengthMismatch, "targets must match feature rows");
  require(static_cast<Eigen::Index>(proxy.p.size()) == n, ErrorKind::kLengthMismatch,
          "proxy length must match the dataset");

  const Moments target = weighted_moments(phi, targets, proxy.p.values());
  InstantDiscrepancies out;
  out.window = window;
  out.d = Vector::Zero(n);
  const auto l = static_cast<Eigen::Index>(window);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, t - l);
    const Eigen::Index hi = std::min<Eigen::Index>(n - 1, t + l);
    const auto count = static_cast<double>(hi - lo + 1);
    Matrix second = Matrix::Zero(phi.cols(), phi.cols());
    Vector cross = Vector::Zero(phi.cols());
    double energy = 0.0;
    for (Eigen::Index s = lo; s <= hi; ++s) {
      const auto row = phi.row(s).transpose();
      second.noalias() += row * row.transpose();
      cross += targets[s] * row;
      energy += targets[s] * targets[s];
    }
    Matrix a = target.second - second / count;
    a = 0.5 * (a + a.transpose());
    const QuadraticForm diff(std::move(a), -2.0 * (target.cross - cross / count),
                             target.energy - energy / count);
    out.d[t] = sup_abs_quadratic_on_ball(diff, ball);
  }
  return out;
}

InstantDiscrepancies instantaneous_discrepancies(const RegressionDataset& data, const KernelSpec& kernel,
                                                 const BallConstraint& ball, const TargetProxy& proxy,
                                                 std::size_t window) {
  return instantaneous_discrepancies(sample_features(kernel, data.features), data.targets, ball, proxy, window);
}

double empirical_discrepancy(const FeatureMatrix& features, const Vector& targets, const BallConstraint& ball,
                             const WeightVector& q, const TargetProxy& proxy) {
  const Eigen::Index n = features.phi.rows();
  require(targets.size() == n && static_cast<Eigen::Index>(q.size()) == n &&
              static_cast<Eigen::Index>(proxy.p.size()) == n,
          ErrorKind::kLengthMismatch, "weights, proxy and targets must match the dataset");
  const Vector delta = proxy.p.values() - q.values();
  if ((delta.array() == 0.0).all()) return 0.0;
  const QuadraticForm form = loss_form(weighted_moments(features.phi, targets, delta));
  return max_quadratic_on_ball(form, ball).value;
}

double empirical_discrepancy(const RegressionDataset& data, const KernelSpec& kernel, const BallConstraint& ball,
                             const WeightVector& q, const TargetProxy& proxy) {
  return empirical_discrepancy(sample_features(kernel, data.features), data.targets, ball, q, proxy);
}

double upper_bound_discrepancy(const InstantDiscrepancies& d, const WeightVector& q, const WeightVector& v,
                               double lambda2, double norm_p) {
  if (d.d.size() != static_cast<Eigen::Index>(q.size()) || q.size() != v.size()) {
    fail(ErrorKind::kLengthMismatch, "discrepancies, q and v must have equal length");
  }
  require(lambda2 >= 0.0, ErrorKind::kInvalidArgument, "lambda2 must be non-negative");
  require(norm_p >= 1.0, ErrorKind::kInvalidArgument, "norm exponent must be >= 1");
  const Vector diff = q.values() - v.values();
  const double penalty = std::pow(diff.array().abs().pow(norm_p).sum(), 1.0 / norm_p);
  return q.values().dot(d.d) + lambda2 * penalty;
}

double markov_conditional_loss(const MarkovChainSpec& spec, double a, double b, int x) {
  const double slope = (a + b - 1.0) * static_cast<double>(x) + b - a;
  return spec.p_left * std::abs(slope + 1.0) + (1.0 - spec.p_left) * std::abs(slope - 1.0);
}

double markov_discrepancy_oracle(const MarkovChainSpec& spec, const std::vector<int>& path, const WeightVector& q,
                                 double grid_step) {
  require(spec.states >= 2, ErrorKind::kInvalidArgument, "Markov chain needs at least two states");
  require(spec.p_left >= 0.0 && spec.p_left <= 1.0, ErrorKind::kInvalidArgument, "p must lie in [0, 1]");
  require(grid_step > 0.0, ErrorKind::kInvalidArgument, "grid step must be positive");
  if (path.size() != q.size() + 1) {
    fail(ErrorKind::kLengthMismatch, "path must hold one more state than there are weights");
  }
  for (int x : path) {
    require(x >= 0 && x < spec.states, ErrorKind::kInvalidArgument, "path state out of range");
  }

  // Conditional expectations depend on the prefix only through X_{t-1}.
  std::map<int, double> by_state;
  for (std::size_t t = 0; t < q.size(); ++t) by_state[path[t]] += q[t];
  const std::vector<std::pair<int, double>> mass(by_state.begin(), by_state.end());
  const int last = path.back();

  auto gap = [&](double a, double b) {
    double v = markov_conditional_loss(spec, a, b, last);
    for (const auto& [state, w] : mass) v -= w * markov_conditional_loss(spec, a, b, state);
    return v;
  };

  double best = -std::numeric_limits<double>::infinity();
  if (spec.family == MarkovFamily::kConstrained) {
    const auto steps = static_cast<long>(std::llround(1.0 / grid_step));
    for (long k = 0; k <= steps; ++k) {
      const double a = std::min(1.0, static_cast<double>(k) * grid_step);
      best = std::max(best, gap(a, 1.0 - a));
    }
  } else {
    require(spec.bound > 0.0, ErrorKind::kInvalidArgument, "hypothesis bound must be positive");
    const auto steps = static_cast<long>(std::llround(spec.bound / grid_step));
    for (long i = 0; i <= steps; ++i) {
      const double a = std::min(spec.bound, static_cast<double>(i) * grid_step);
      for (long j = 0; j <= steps; ++j) {
        const double b = std::min(spec.bound, static_cast<double>(j) * grid_step);
        best = std::max(best, gap(a, b));
      }
    }
  }
  return best;
}

}  // namespace dbf
