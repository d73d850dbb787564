#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dbf/error.hpp"

namespace dbf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Scalar observations y_1..y_T. Values are validated finite on construction.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, long origin_index = 1);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  long origin_index() const { return origin_index_; }

  /// First n observations, keeping the origin.
  TimeSeries prefix(std::size_t n) const;

 private:
  std::vector<double> values_;
  long origin_index_;
};

/// Lag-embedded supervised view: row t holds (y_t, ..., y_{t+lag-1}) and
/// the target is y_{t+lag} (0-based over the source series).
struct RegressionDataset {
  Matrix features;
  Vector targets;
  std::size_t lag = 0;

  RegressionDataset() = default;
  RegressionDataset(Matrix features, Vector targets, std::size_t lag);

  std::size_t rows() const { return static_cast<std::size_t>(targets.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

  /// Same features with the targets swapped out (used to plug in
  /// generator conditional means).
  RegressionDataset with_targets(Vector new_targets) const;
};

class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(Vector weights, bool simplex = false);

  static WeightVector uniform(std::size_t n);
  static WeightVector one_hot(std::size_t n, std::size_t index);

  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  const Vector& values() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }
  bool is_simplex() const { return simplex_; }
  double sum() const { return weights_.sum(); }

 private:
  Vector weights_;
  bool simplex_ = false;
};

enum class LossType { kSquaredError };

struct LossKind {
  LossType type = LossType::kSquaredError;
  // Reporting-only bound on |f|; never enters a computation.
  std::optional<double> bound;

  double operator()(double prediction, double target) const {
    const double r = prediction - target;
    return r * r;
  }
};

RegressionDataset embed_lags(const TimeSeries& series, std::size_t lag);

/// Inverse of embed_lags: first `lag` entries of row 0 followed by the targets.
std::vector<double> unembed(const RegressionDataset& data);

/// Sum_t q_t L(pred_t, y_t), accumulated in time order.
double weighted_empirical_loss(const RegressionDataset& data, const Vector& predictions,
                               const WeightVector& q, const LossKind& loss = {});

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

}  // namespace dbf
