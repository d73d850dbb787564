#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbf/core.hpp"

namespace dbf {

using HyperParams = std::map<std::string, double>;

/// Training data visible to a forecaster: y_1..y_n and, for generated
/// series, the generator's conditional means over the same range.
struct TrainingWindow {
  std::span<const double> values;
  std::span<const double> conditional_mean;
};

class Predictor {
 public:
  virtual ~Predictor() = default;

  /// Prediction of y_{k+1} given history y_1..y_k.
  virtual double predict_next(std::span<const double> history) const = 0;

  /// Recursive multi-step forecast: each prediction is appended to the
  /// history before the next one is made.
  virtual std::vector<double> forecast(std::span<const double> history, std::size_t horizon) const;

  /// Sample weights of the fit, when the model has any.
  virtual std::vector<double> weights() const { return {}; }
};

/// Per-window state shared by every grid point (e.g. precomputed
/// discrepancies).
class PreparedTraining {
 public:
  virtual ~PreparedTraining() = default;
  virtual std::unique_ptr<Predictor> fit(const HyperParams& params) const = 0;
};

class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string name() const = 0;
  virtual std::vector<HyperParams> grid() const = 0;
  virtual std::unique_ptr<PreparedTraining> prepare(const TrainingWindow& window) const = 0;
};

struct ProtocolSpec {
  std::vector<std::size_t> schedule;  // cut times t (number of observations in the development set)
  std::size_t dev_holdout = 25;
  std::size_t test_horizon = 25;
  std::size_t min_train = 10;
  bool recursive_test = true;  // false: one-step-ahead with true history on the test window
  std::size_t threads = 0;     // 0: THREADS environment variable / hardware concurrency

  void validate(std::size_t series_length) const;
};

/// {first + k * step : t + horizon <= length}.
std::vector<std::size_t> default_schedule(std::size_t length, std::size_t first = 750, std::size_t step = 25,
                                          std::size_t horizon = 25);

struct AlgorithmReport {
  std::string name;
  std::vector<double> cut_mse;
  double mean_mse = 0.0;
  double std_mse = 0.0;
  std::vector<double> running_mse;
  std::vector<HyperParams> selected;
  std::vector<std::vector<double>> forecasts;
  std::vector<std::vector<double>> weights;
};

struct PairedTest {
  std::string a;
  std::string b;
  std::optional<double> p_a_less_b;
  std::optional<double> p_b_less_a;
};

struct EvaluationReport {
  std::vector<std::size_t> cuts;
  std::vector<std::vector<double>> truth;
  std::vector<AlgorithmReport> algorithms;
  std::vector<PairedTest> tests;

  const AlgorithmReport& algorithm(const std::string& name) const;
};

/// Rolling-origin evaluation: at every cut t, each grid point is trained on
/// y_1..y_{t-holdout} and scored by one-step predictions on the holdout;
/// the best point (first on ties) is retrained on y_1..y_t and forecasts
/// y_{t+1..t+horizon}. Failed cells score +inf and are never selected.
EvaluationReport run_protocol(const TimeSeries& series, std::span<const double> conditional_mean,
                              const std::vector<std::shared_ptr<const Forecaster>>& algorithms,
                              const ProtocolSpec& spec);

}  // namespace dbf
