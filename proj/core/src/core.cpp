#include "dbf/core.hpp"

#include <cmath>
#include <string>

namespace dbf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kSeriesTooShort: return "SeriesTooShort";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNotPsd: return "NotPSD";
    case ErrorKind::kBadWindow: return "BadWindow";
    case ErrorKind::kSingularSystem: return "SingularSystem";
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kDegenerateSample: return "DegenerateSample";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + ": " + message);
}

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

TimeSeries::TimeSeries(std::vector<double> values, long origin_index)
    : values_(std::move(values)), origin_index_(origin_index) {
  require(!values_.empty(), ErrorKind::kSeriesTooShort, "time series must be non-empty");
  for (double v : values_) {
    require(std::isfinite(v), ErrorKind::kInvalidArgument, "time series contains a non-finite value");
  }
}

TimeSeries TimeSeries::prefix(std::size_t n) const {
  require(n >= 1 && n <= values_.size(), ErrorKind::kInvalidArgument, "prefix length out of range");
  return TimeSeries(std::vector<double>(values_.begin(), values_.begin() + static_cast<long>(n)),
                    origin_index_);
}

RegressionDataset::RegressionDataset(Matrix f, Vector y, std::size_t l)
    : features(std::move(f)), targets(std::move(y)), lag(l) {
  require(features.rows() == targets.size(), ErrorKind::kLengthMismatch,
          "feature rows must match target count");
  require(all_finite(features) && all_finite(targets), ErrorKind::kInvalidArgument,
          "dataset contains non-finite values");
}

RegressionDataset RegressionDataset::with_targets(Vector new_targets) const {
  return RegressionDataset(features, std::move(new_targets), lag);
}

WeightVector::WeightVector(Vector weights, bool simplex)
    : weights_(std::move(weights)), simplex_(simplex) {
  require(all_finite(weights_), ErrorKind::kInvalidArgument, "weights must be finite");
  if (simplex_) {
    require((weights_.array() >= 0.0).all(), ErrorKind::kInvalidArgument,
            "simplex weights must be non-negative");
    require(std::abs(weights_.sum() - 1.0) <= 1e-9, ErrorKind::kInvalidArgument,
            "simplex weights must sum to one");
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  require(n >= 1, ErrorKind::kInvalidArgument, "uniform weights need n >= 1");
  return WeightVector(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)),
                      true);
}

WeightVector WeightVector::one_hot(std::size_t n, std::size_t index) {
  require(index < n, ErrorKind::kInvalidArgument, "one-hot index out of range");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(n));
  w[static_cast<Eigen::Index>(index)] = 1.0;
  return WeightVector(std::move(w), true);
}

RegressionDataset embed_lags(const TimeSeries& series, std::size_t lag) {
  require(lag >= 1, ErrorKind::kInvalidArgument, "lag must be positive");
  if (series.size() <= lag) {
    fail(ErrorKind::kSeriesTooShort, "series of length " + std::to_string(series.size()) +
                                         " cannot be embedded with lag " + std::to_string(lag));
  }
  const auto rows = static_cast<Eigen::Index>(series.size() - lag);
  const auto cols = static_cast<Eigen::Index>(lag);
  Matrix features(rows, cols);
  Vector targets(rows);
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      features(t, j) = series[static_cast<std::size_t>(t + j)];
    }
    targets[t] = series[static_cast<std::size_t>(t + cols)];
  }
  return RegressionDataset(std::move(features), std::move(targets), lag);
}

std::vector<double> unembed(const RegressionDataset& data) {
  std::vector<double> out;
  if (data.rows() == 0) return out;
  out.reserve(data.lag + data.rows());
  for (std::size_t j = 0; j < data.lag; ++j) out.push_back(data.features(0, static_cast<Eigen::Index>(j)));
  for (Eigen::Index t = 0; t < data.targets.size(); ++t) out.push_back(data.targets[t]);
  return out;
}

double weighted_empirical_loss(const RegressionDataset& data, const Vector& predictions,
                               const WeightVector& q, const LossKind& loss) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  if (predictions.size() != n || static_cast<Eigen::Index>(q.size()) != n) {
    fail(ErrorKind::kLengthMismatch, "predictions and weights must match the dataset row count");
  }
  double total = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    total += q.values()[t] * loss(predictions[t], data.targets[t]);
  }
  return total;
}

}  // namespace dbf
