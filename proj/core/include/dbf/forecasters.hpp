#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dbf/kernels.hpp"
#include "dbf/protocol.hpp"
#include "dbf/solvers.hpp"

namespace dbf {

enum class DbfSolver { kAlternating, kConvex, kDual, kTwoStage };
enum class DiscrepancySource { kEstimated, kTrue };

struct ForecasterOptions {
  std::size_t lag = 3;
  KernelSpec kernel = KernelSpec::linear();
  // Ball radius for discrepancy sups; unset means 2 * ||uniform ridge solution||.
  std::optional<double> radius;
  std::size_t s = 20;
  std::size_t window = 0;
  int max_iters = 500;
  double tol = 1e-8;
  // Replaces the default grid when non-empty.
  std::vector<HyperParams> grid;
};

/// Known names: tdbf, edbf, dbf-alt, dbf-convex, dbf-dual, two-stage,
/// ridge, arima, zero. Throws InvalidArgument otherwise.
std::shared_ptr<const Forecaster> make_forecaster(const std::string& name, const ForecasterOptions& options = {});

std::vector<std::string> forecaster_names();

std::vector<HyperParams> dbf_grid();
std::vector<HyperParams> ridge_grid();
std::vector<HyperParams> two_stage_grid();
std::vector<HyperParams> arima_grid();

/// Uniform-weight ridge (lambda = 1e-6) norm times two, or 1 when that is zero.
double default_radius(const RegressionDataset& data, const KernelSpec& kernel);

/// Fitted model behind a DBF-family predictor, exposed for the CLI.
struct DbfModel {
  FitResult fit;
  KernelSpec kernel;
  Matrix training_features;
  std::size_t lag = 0;
};

/// One fit of the named DBF-family or ridge algorithm on a series; used by
/// the fit/forecast commands.
DbfModel fit_named_model(const std::string& name, std::span<const double> values,
                         std::span<const double> conditional_mean, const HyperParams& params,
                         const ForecasterOptions& options);

double predict_next(const DbfModel& model, std::span<const double> history);

}  // namespace dbf
