#include "dbf/forecasters.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dbf/arima.hpp"
#include "dbf/discrepancy.hpp"

namespace dbf {

std::vector<HyperParams> dbf_grid() {
  std::vector<HyperParams> out;
  for (double l1 : {1e-3, 1e-4, 1e-5, 1e-6}) {
    for (double l2 : {100.0, 10.0, 1.0, 0.1, 0.05, 0.01, 0.001, 0.0}) out.push_back({{"lambda1", l1}, {"lambda2", l2}});
  }
  return out;
}

std::vector<HyperParams> ridge_grid() {
  std::vector<HyperParams> out;
  for (double l1 : {1e-3, 1e-4, 1e-5, 1e-6}) out.push_back({{"lambda1", l1}});
  return out;
}

std::vector<HyperParams> two_stage_grid() {
  std::vector<HyperParams> out;
  for (double l2 : {1e-3, 1e-4, 1e-5, 1e-6}) out.push_back({{"lambda2", l2}});
  return out;
}

std::vector<HyperParams> arima_grid() {
  std::vector<HyperParams> out;
  for (int p = 0; p <= 2; ++p) {
    for (int d = 0; d <= 2; ++d) {
      for (int q = 0; q <= 2; ++q) out.push_back({{"p", p}, {"d", d}, {"q", q}});
    }
  }
  return out;
}

std::vector<std::string> forecaster_names() {
  return {"tdbf", "edbf", "dbf-alt", "dbf-convex", "dbf-dual", "two-stage", "ridge", "arima", "zero"};
}

double default_radius(const RegressionDataset& data, const KernelSpec& kernel) {
  const FeatureMatrix fm = sample_features(kernel, data.features);
  const Vector uniform = Vector::Constant(static_cast<Eigen::Index>(data.rows()), 1.0 / static_cast<double>(data.rows()));
  const double norm = weighted_ridge_features(fm.phi, data.targets, uniform, 1e-6).norm();
  return norm > 0.0 ? 2.0 * norm : 1.0;
}

namespace {

double param(const HyperParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Vector lag_row(std::span<const double> history, std::size_t lag) {
  require(history.size() >= lag, ErrorKind::kSeriesTooShort, "history is shorter than the lag");
  Vector x(static_cast<Eigen::Index>(lag));
  for (std::size_t j = 0; j < lag; ++j) x[static_cast<Eigen::Index>(j)] = history[history.size() - lag + j];
  return x;
}

RegressionDataset embed(std::span<const double> values, std::size_t lag) {
  return embed_lags(TimeSeries(std::vector<double>(values.begin(), values.end())), lag);
}

// Conditional means aligned with the embedded targets.
Vector aligned_means(std::span<const double> means, std::size_t lag) {
  Vector out(static_cast<Eigen::Index>(means.size() - lag));
  for (std::size_t t = lag; t < means.size(); ++t) out[static_cast<Eigen::Index>(t - lag)] = means[t];
  return out;
}

struct Algorithm {
  enum class Kind { kDbf, kRidge } kind = Kind::kDbf;
  DbfSolver solver = DbfSolver::kAlternating;
  DiscrepancySource source = DiscrepancySource::kEstimated;
};

Algorithm algorithm_for(const std::string& name) {
  if (name == "tdbf") return {Algorithm::Kind::kDbf, DbfSolver::kAlternating, DiscrepancySource::kTrue};
  if (name == "edbf" || name == "dbf-alt") return {};
  if (name == "dbf-convex") return {Algorithm::Kind::kDbf, DbfSolver::kConvex, DiscrepancySource::kEstimated};
  if (name == "dbf-dual") return {Algorithm::Kind::kDbf, DbfSolver::kDual, DiscrepancySource::kEstimated};
  if (name == "two-stage") return {Algorithm::Kind::kDbf, DbfSolver::kTwoStage, DiscrepancySource::kEstimated};
  if (name == "ridge") return {Algorithm::Kind::kRidge, DbfSolver::kAlternating, DiscrepancySource::kEstimated};
  fail(ErrorKind::kInvalidArgument, "unknown model algorithm: " + name);
}

SolverConfig solver_config(const ForecasterOptions& options, DbfSolver solver, double radius) {
  SolverConfig config;
  config.radius = radius;
  config.s = options.s;
  config.window = options.window;
  config.max_iters = options.max_iters;
  config.tol = options.tol;
  if (solver == DbfSolver::kConvex) config.norm_p = 2.0;
  return config;
}

// Everything that depends on the training window but not on the grid point.
struct DbfPrep {
  RegressionDataset data;
  double radius = 1.0;
  std::optional<InstantDiscrepancies> d;
};

DbfPrep prepare_dbf(const Algorithm& algo, std::span<const double> values, std::span<const double> means,
                    const ForecasterOptions& options) {
  DbfPrep prep{embed(values, options.lag), 1.0, std::nullopt};
  if (algo.kind == Algorithm::Kind::kRidge) return prep;
  prep.radius = options.radius ? *options.radius : default_radius(prep.data, options.kernel);
  if (algo.solver == DbfSolver::kTwoStage) return prep;
  const std::size_t n = prep.data.rows();
  const TargetProxy proxy = target_proxy(n, std::min(options.s, n));
  const BallConstraint ball(prep.radius);
  if (algo.source == DiscrepancySource::kTrue) {
    require(means.size() == values.size(), ErrorKind::kInvalidArgument,
            "true discrepancies need the generator's conditional means");
    prep.d = instantaneous_discrepancies(prep.data.with_targets(aligned_means(means, options.lag)), options.kernel,
                                         ball, proxy, options.window);
  } else {
    prep.d = instantaneous_discrepancies(prep.data, options.kernel, ball, proxy, options.window);
  }
  return prep;
}

FitResult fit_ridge(const RegressionDataset& data, const KernelSpec& kernel, double lambda1) {
  FitResult out;
  const WeightVector q = WeightVector::uniform(data.rows());
  if (kernel.kind == KernelKind::kLinear) {
    out.coefficients = PrimalCoefficients{weighted_ridge_primal(data, q, lambda1)};
  } else {
    const DualRidge dual = weighted_ridge_dual(gram(kernel, data.features), q, lambda1, data.targets);
    out.coefficients = DualCoefficients{dual.alpha, dual.scale};
  }
  out.q = q;
  out.converged = true;
  return out;
}

DbfModel fit_prepared(const Algorithm& algo, const DbfPrep& prep, const HyperParams& params,
                      const ForecasterOptions& options) {
  DbfModel model;
  model.kernel = options.kernel;
  model.training_features = prep.data.features;
  model.lag = options.lag;
  const double lambda1 = param(params, "lambda1", 1e-3);
  if (algo.kind == Algorithm::Kind::kRidge) {
    model.fit = fit_ridge(prep.data, options.kernel, lambda1);
    return model;
  }
  SolverConfig config = solver_config(options, algo.solver, prep.radius);
  config.lambda1 = lambda1;
  config.lambda2 = param(params, "lambda2", 1.0);
  switch (algo.solver) {
    case DbfSolver::kAlternating: model.fit = fit_dbf_alternating(prep.data, options.kernel, *prep.d, config); break;
    case DbfSolver::kConvex: model.fit = fit_dbf_convex(prep.data, options.kernel, *prep.d, config); break;
    case DbfSolver::kDual: model.fit = fit_dbf_dual(prep.data, options.kernel, *prep.d, config); break;
    case DbfSolver::kTwoStage: model.fit = fit_two_stage(prep.data, options.kernel, config); break;
  }
  return model;
}

class ModelPredictor final : public Predictor {
 public:
  explicit ModelPredictor(DbfModel model) : model_(std::move(model)) {}
  double predict_next(std::span<const double> history) const override { return dbf::predict_next(model_, history); }
  std::vector<double> weights() const override {
    const Vector& q = model_.fit.q.values();
    return {q.data(), q.data() + q.size()};
  }

 private:
  DbfModel model_;
};

class ModelPrepared final : public PreparedTraining {
 public:
  ModelPrepared(Algorithm algo, DbfPrep prep, ForecasterOptions options)
      : algo_(algo), prep_(std::move(prep)), options_(std::move(options)) {}
  std::unique_ptr<Predictor> fit(const HyperParams& params) const override {
    return std::make_unique<ModelPredictor>(fit_prepared(algo_, prep_, params, options_));
  }

 private:
  Algorithm algo_;
  DbfPrep prep_;
  ForecasterOptions options_;
};

class ModelForecaster final : public Forecaster {
 public:
  ModelForecaster(std::string name, ForecasterOptions options)
      : name_(std::move(name)), algo_(algorithm_for(name_)), options_(std::move(options)) {}
  std::string name() const override { return name_; }
  std::vector<HyperParams> grid() const override {
    if (!options_.grid.empty()) return options_.grid;
    if (algo_.kind == Algorithm::Kind::kRidge) return ridge_grid();
    if (algo_.solver == DbfSolver::kTwoStage) return two_stage_grid();
    return dbf_grid();
  }
  std::unique_ptr<PreparedTraining> prepare(const TrainingWindow& window) const override {
    return std::make_unique<ModelPrepared>(algo_, prepare_dbf(algo_, window.values, window.conditional_mean, options_),
                                           options_);
  }

 private:
  std::string name_;
  Algorithm algo_;
  ForecasterOptions options_;
};

class ArimaPredictor final : public Predictor {
 public:
  explicit ArimaPredictor(ArimaModel model) : model_(std::move(model)) {}
  double predict_next(std::span<const double> history) const override { return forecast(history, 1).front(); }
  std::vector<double> forecast(std::span<const double> history, std::size_t horizon) const override {
    return forecast_arima(model_, TimeSeries(std::vector<double>(history.begin(), history.end())), horizon);
  }

 private:
  ArimaModel model_;
};

class ArimaPrepared final : public PreparedTraining {
 public:
  explicit ArimaPrepared(TimeSeries series) : series_(std::move(series)) {}
  std::unique_ptr<Predictor> fit(const HyperParams& params) const override {
    const ArimaOrder order{static_cast<int>(param(params, "p", 0)), static_cast<int>(param(params, "d", 0)),
                           static_cast<int>(param(params, "q", 0))};
    return std::make_unique<ArimaPredictor>(fit_arima(series_, order));
  }

 private:
  TimeSeries series_;
};

class ArimaForecaster final : public Forecaster {
 public:
  explicit ArimaForecaster(std::vector<HyperParams> grid) : grid_(std::move(grid)) {}
  std::string name() const override { return "arima"; }
  std::vector<HyperParams> grid() const override { return grid_.empty() ? arima_grid() : grid_; }
  std::unique_ptr<PreparedTraining> prepare(const TrainingWindow& window) const override {
    return std::make_unique<ArimaPrepared>(
        TimeSeries(std::vector<double>(window.values.begin(), window.values.end())));
  }

 private:
  std::vector<HyperParams> grid_;
};

class ZeroPredictor final : public Predictor {
 public:
  double predict_next(std::span<const double>) const override { return 0.0; }
};

class ZeroPrepared final : public PreparedTraining {
 public:
  std::unique_ptr<Predictor> fit(const HyperParams&) const override { return std::make_unique<ZeroPredictor>(); }
};

class ZeroForecaster final : public Forecaster {
 public:
  std::string name() const override { return "zero"; }
  std::vector<HyperParams> grid() const override { return {HyperParams{}}; }
  std::unique_ptr<PreparedTraining> prepare(const TrainingWindow&) const override {
    return std::make_unique<ZeroPrepared>();
  }
};

}  // namespace

std::shared_ptr<const Forecaster> make_forecaster(const std::string& name, const ForecasterOptions& options) {
  require(options.lag >= 1, ErrorKind::kInvalidArgument, "lag must be >= 1");
  if (name == "arima") return std::make_shared<ArimaForecaster>(options.grid);
  if (name == "zero") return std::make_shared<ZeroForecaster>();
  return std::make_shared<ModelForecaster>(name, options);
}

DbfModel fit_named_model(const std::string& name, std::span<const double> values,
                         std::span<const double> conditional_mean, const HyperParams& params,
                         const ForecasterOptions& options) {
  const Algorithm algo = algorithm_for(name);
  return fit_prepared(algo, prepare_dbf(algo, values, conditional_mean, options), params, options);
}

double predict_next(const DbfModel& model, std::span<const double> history) {
  return predict(model.fit, model.kernel, model.training_features, lag_row(history, model.lag));
}

}  // namespace dbf
