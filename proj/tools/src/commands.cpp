#include "dbf/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>

#include "dbf/arima.hpp"
#include "dbf/cli/io.hpp"
#include "dbf/datagen.hpp"
#include "dbf/discrepancy.hpp"
#include "dbf/forecasters.hpp"

namespace dbf::cli {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotPsd:
    case ErrorKind::kSingularSystem:
    case ErrorKind::kNumericalFailure:
    case ErrorKind::kDegenerateSample:
      return kExitNumerical;
    default:
      return kExitData;
  }
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json finite_list(std::span<const double> values) {
  json out = json::array();
  for (double v : values) out.push_back(finite_or_null(v));
  return out;
}

void require_output(const RunConfig& c) {
  if (c.output.empty()) throw UsageError("--out is required");
}

DatasetKind dataset_kind(const std::string& name) {
  const auto kind = parse_dataset(name);
  if (!kind) throw UsageError("unknown dataset '" + name + "'");
  return *kind;
}

GeneratedSeries generate_from(const RunConfig& c) {
  GeneratorSpec spec;
  spec.which = dataset_kind(c.generator.dataset);
  spec.length = c.generator.length;
  spec.seed = c.seed;
  spec.sigma = c.generator.sigma;
  return generate(spec);
}

KernelSpec kernel_of(const RunConfig& c) {
  try {
    return KernelSpec::parse(c.model.kernel);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

ForecasterOptions options_of(const RunConfig& c) {
  ForecasterOptions o;
  o.lag = c.model.lag;
  o.kernel = kernel_of(c);
  o.radius = c.model.radius;
  o.s = c.model.s;
  o.window = c.model.window;
  o.max_iters = c.model.max_iters;
  o.tol = c.model.tol;
  return o;
}

bool known_forecaster(const std::string& name) {
  const auto names = forecaster_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

json coefficients_json(const Coefficients& coefficients) {
  if (const auto* primal = std::get_if<PrimalCoefficients>(&coefficients)) return {{"w", vector_json(primal->w)}};
  const auto& dual = std::get<DualCoefficients>(coefficients);
  return {{"alpha", vector_json(dual.alpha)}, {"scale", dual.scale}};
}

std::string plot_csv_running(const EvaluationReport& report) {
  std::string out = "cut";
  for (const auto& a : report.algorithms) out += "," + a.name;
  out += "\n";
  for (std::size_t c = 0; c < report.cuts.size(); ++c) {
    out += std::to_string(report.cuts[c]);
    for (const auto& a : report.algorithms) out += "," + format_double(a.running_mse[c]);
    out += "\n";
  }
  return out;
}

std::string plot_csv_weights(const EvaluationReport& report, std::size_t lag) {
  std::string out = "algorithm,cut,time,weight\n";
  for (const auto& a : report.algorithms) {
    for (std::size_t c = 0; c < report.cuts.size(); ++c) {
      const auto& w = a.weights[c];
      for (std::size_t i = 0; i < w.size(); ++i) {
        // Weight i belongs to the target y_{i + lag + 1}.
        out += a.name + "," + std::to_string(report.cuts[c]) + "," + std::to_string(i + lag + 1) + "," +
               format_double(w[i]) + "\n";
      }
    }
  }
  return out;
}

std::string plot_csv_forecasts(const EvaluationReport& report) {
  std::string out = "algorithm,cut,time,forecast,truth\n";
  for (const auto& a : report.algorithms) {
    for (std::size_t c = 0; c < report.cuts.size(); ++c) {
      const auto& f = a.forecasts[c];
      for (std::size_t h = 0; h < f.size(); ++h) {
        out += a.name + "," + std::to_string(report.cuts[c]) + "," + std::to_string(report.cuts[c] + h + 1) + "," +
               format_double(f[h]) + "," + format_double(report.truth[c][h]) + "\n";
      }
    }
  }
  return out;
}

}  // namespace

void cmd_generate(const RunConfig& c) {
  require_output(c);
  const GeneratedSeries gen = generate_from(c);
  write_file_atomic(c.output, series_csv(gen.series.values()));
}

void cmd_discrepancy(const RunConfig& c) {
  require_output(c);
  if (c.input.empty()) throw UsageError("--in is required");
  const TimeSeries series = read_series_csv(c.input);
  const KernelSpec kernel = kernel_of(c);
  const RegressionDataset data = embed_lags(series, c.model.lag);
  const double radius = c.model.radius ? *c.model.radius : default_radius(data, kernel);
  const TargetProxy proxy = target_proxy(data.rows(), std::min(c.model.s, data.rows()));
  const InstantDiscrepancies d =
      instantaneous_discrepancies(data, kernel, BallConstraint(radius), proxy, c.model.window);
  json out;
  out["d"] = vector_json(d.d);
  out["s"] = proxy.s;
  out["l"] = c.model.window;
  out["lambda_cap"] = radius;
  out["kernel"] = kernel.to_string();
  out["lag"] = c.model.lag;
  write_file_atomic(c.output, dump_json(out));
}

void cmd_fit(const RunConfig& c) {
  require_output(c);
  if (c.input.empty()) throw UsageError("--in is required");
  static const std::vector<std::string> kAllowed{"dbf-alt", "dbf-convex", "dbf-dual", "two-stage", "ridge", "arima"};
  if (std::find(kAllowed.begin(), kAllowed.end(), c.algorithm) == kAllowed.end()) {
    throw UsageError("unknown algorithm '" + c.algorithm + "'");
  }
  const TimeSeries series = read_series_csv(c.input);
  json out;
  out["algorithm"] = c.algorithm;
  if (c.algorithm == "arima") {
    if (c.model.order.size() != 3) throw UsageError("--order needs p,d,q");
    const ArimaOrder order{c.model.order[0], c.model.order[1], c.model.order[2]};
    const ArimaModel model = fit_arima(series, order);
    out["hyperparameters"] = {{"p", order.p}, {"d", order.d}, {"q", order.q}};
    out["coefficients"] = {{"phi", vector_json(model.phi)},
                           {"theta", vector_json(model.theta)},
                           {"intercept", model.intercept},
                           {"sigma2", model.sigma2}};
    out["q"] = nullptr;
    out["objective_trace"] = {model.css};
    out["converged"] = model.converged;
    out["forecasts"] = finite_list(forecast_arima(model, series, c.horizon));
  } else {
    const HyperParams params{{"lambda1", c.model.lambda1}, {"lambda2", c.model.lambda2}};
    const DbfModel model = fit_named_model(c.algorithm, series.values(), {}, params, options_of(c));
    out["hyperparameters"] = params;
    out["coefficients"] = coefficients_json(model.fit.coefficients);
    out["q"] = vector_json(model.fit.q.values());
    out["objective_trace"] = finite_list(model.fit.objective_trace);
    out["iterations"] = model.fit.iterations;
    out["converged"] = model.fit.converged;
    if (model.fit.radius > 0.0) out["radius"] = model.fit.radius;
    std::vector<double> history(series.values().begin(), series.values().end());
    std::vector<double> forecasts;
    for (std::size_t h = 0; h < c.horizon; ++h) {
      forecasts.push_back(predict_next(model, history));
      history.push_back(forecasts.back());
    }
    out["forecasts"] = finite_list(forecasts);
  }
  write_file_atomic(c.output, dump_json(out));
}

json report_to_json(const EvaluationReport& report) {
  json algorithms = json::object();
  for (const auto& a : report.algorithms) {
    json entry;
    entry["cut_mse"] = finite_list(a.cut_mse);
    entry["mean_mse"] = finite_or_null(a.mean_mse);
    entry["std_mse"] = finite_or_null(a.std_mse);
    entry["running_mse"] = finite_list(a.running_mse);
    entry["selected"] = a.selected;
    json forecasts = json::array();
    for (const auto& f : a.forecasts) forecasts.push_back(finite_list(f));
    entry["forecasts"] = std::move(forecasts);
    algorithms[a.name] = std::move(entry);
  }
  json tests = json::array();
  for (const auto& t : report.tests) {
    tests.push_back({{"a", t.a},
                     {"b", t.b},
                     {"p_a_less_b", t.p_a_less_b ? json(*t.p_a_less_b) : json(nullptr)},
                     {"p_b_less_a", t.p_b_less_a ? json(*t.p_b_less_a) : json(nullptr)}});
  }
  return {{"cuts", report.cuts}, {"algorithms", std::move(algorithms)}, {"tests", std::move(tests)}};
}

void cmd_evaluate(const RunConfig& c) {
  require_output(c);
  if (c.protocol.algorithms.empty()) throw UsageError("no algorithms given");
  for (const auto& name : c.protocol.algorithms) {
    if (!known_forecaster(name)) throw UsageError("unknown algorithm '" + name + "'");
  }
  std::optional<TimeSeries> series;
  std::vector<double> means;
  if (!c.input.empty()) {
    series = read_series_csv(c.input);
  } else {
    GeneratedSeries gen = generate_from(c);
    series = std::move(gen.series);
    means = std::move(gen.conditional_mean);
  }
  for (const auto& name : c.protocol.algorithms) {
    if (name == "tdbf" && means.empty()) {
      throw UsageError("tdbf needs a generated dataset (--dataset) for its true discrepancies");
    }
  }

  std::vector<std::shared_ptr<const Forecaster>> algorithms;
  for (const auto& name : c.protocol.algorithms) {
    ForecasterOptions options = options_of(c);
    if (const auto it = c.protocol.grids.find(name); it != c.protocol.grids.end()) options.grid = it->second;
    algorithms.push_back(make_forecaster(name, options));
  }

  ProtocolSpec spec;
  spec.schedule = default_schedule(series->size(), c.protocol.first, c.protocol.step, c.protocol.horizon);
  spec.dev_holdout = c.protocol.holdout;
  spec.test_horizon = c.protocol.horizon;
  spec.min_train = c.model.lag + 2;
  spec.recursive_test = c.protocol.recursive;
  spec.threads = c.threads;
  const EvaluationReport report = run_protocol(*series, means, algorithms, spec);

  json out = report_to_json(report);
  json config = to_json(c);
  // Output locations do not affect the results; keep reports comparable across runs.
  config.erase("output");
  config.erase("plots_dir");
  out["config"] = std::move(config);
  if (!c.plots_dir.empty()) {
    const std::filesystem::path dir(c.plots_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::kIo, "cannot create " + dir.string());
    write_file_atomic(dir / "running_mse.csv", plot_csv_running(report));
    write_file_atomic(dir / "q_weights.csv", plot_csv_weights(report, c.model.lag));
    write_file_atomic(dir / "forecasts.csv", plot_csv_forecasts(report));
  }
  write_file_atomic(c.output, dump_json(out));
}

}  // namespace dbf::cli
