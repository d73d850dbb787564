#include "dbf/protocol.hpp"

#include <cmath>
#include <string>

#include "dbf/parallel.hpp"
#include "dbf/stats.hpp"

namespace dbf {

std::vector<double> Predictor::forecast(std::span<const double> history, std::size_t horizon) const {
  std::vector<double> extended(history.begin(), history.end());
  std::vector<double> out;
  out.reserve(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    const double next = predict_next(extended);
    out.push_back(next);
    extended.push_back(next);
  }
  return out;
}

void ProtocolSpec::validate(std::size_t length) const {
  require(!schedule.empty(), ErrorKind::kInvalidArgument, "protocol schedule is empty");
  require(dev_holdout >= 1 && test_horizon >= 1, ErrorKind::kInvalidArgument, "holdout and horizon must be >= 1");
  for (std::size_t t : schedule) {
    if (t < dev_holdout + min_train || t + test_horizon > length) {
      fail(ErrorKind::kInvalidArgument, "cut " + std::to_string(t) + " is infeasible for a series of length " +
                                            std::to_string(length));
    }
  }
}

std::vector<std::size_t> default_schedule(std::size_t length, std::size_t first, std::size_t step,
                                          std::size_t horizon) {
  require(step >= 1, ErrorKind::kInvalidArgument, "schedule step must be >= 1");
  std::vector<std::size_t> out;
  for (std::size_t t = first; t + horizon <= length; t += step) out.push_back(t);
  return out;
}

const AlgorithmReport& EvaluationReport::algorithm(const std::string& name) const {
  for (const auto& a : algorithms) {
    if (a.name == name) return a;
  }
  fail(ErrorKind::kInvalidArgument, "no algorithm named " + name + " in the report");
}

namespace {

struct CellResult {
  double mse = std::numeric_limits<double>::infinity();
  HyperParams selected;
  std::vector<double> forecast;
  std::vector<double> weights;
};

TrainingWindow window_of(std::span<const double> values, std::span<const double> means, std::size_t n) {
  return {values.first(n), means.empty() ? means : means.first(n)};
}

double holdout_score(const Predictor& predictor, std::span<const double> values, std::size_t train_end,
                     std::size_t holdout) {
  double total = 0.0;
  for (std::size_t k = 0; k < holdout; ++k) {
    const std::size_t target = train_end + k;
    const double pred = predictor.predict_next(values.first(target));
    if (!std::isfinite(pred)) return std::numeric_limits<double>::infinity();
    const double r = pred - values[target];
    total += r * r;
  }
  return total / static_cast<double>(holdout);
}

CellResult run_cell(const Forecaster& algorithm, std::span<const double> values, std::span<const double> means,
                    std::size_t cut, const ProtocolSpec& spec) {
  CellResult out;
  const std::vector<HyperParams> grid = algorithm.grid();
  require(!grid.empty(), ErrorKind::kInvalidArgument, "algorithm grid is empty");

  const std::size_t train_end = cut - spec.dev_holdout;
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  try {
    const auto prepared = algorithm.prepare(window_of(values, means, train_end));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double score = std::numeric_limits<double>::infinity();
      try {
        const auto predictor = prepared->fit(grid[g]);
        score = holdout_score(*predictor, values, train_end, spec.dev_holdout);
      } catch (const Error&) {
        // failed cell: +inf, never selected
      }
      if (score < best_score) {
        best_score = score;
        best = g;
      }
    }
  } catch (const Error&) {
    // preparation failed for the development prefix; fall back to the first grid point
  }
  out.selected = grid[best];

  try {
    const auto prepared = algorithm.prepare(window_of(values, means, cut));
    const auto predictor = prepared->fit(out.selected);
    const auto history = values.first(cut);
    if (spec.recursive_test) {
      out.forecast = predictor->forecast(history, spec.test_horizon);
    } else {
      for (std::size_t k = 0; k < spec.test_horizon; ++k) {
        out.forecast.push_back(predictor->predict_next(values.first(cut + k)));
      }
    }
    out.weights = predictor->weights();
    out.mse = mse(out.forecast, values.subspan(cut, spec.test_horizon));
    if (!std::isfinite(out.mse)) out.mse = std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    out.mse = std::numeric_limits<double>::infinity();
  }
  return out;
}

std::optional<double> one_sided_p(const std::vector<double>& a, const std::vector<double>& b) {
  try {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!std::isfinite(a[i]) || !std::isfinite(b[i])) return std::nullopt;
    }
    return paired_t_test(a, b, Alternative::kLess).p_value;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

EvaluationReport run_protocol(const TimeSeries& series, std::span<const double> conditional_mean,
                              const std::vector<std::shared_ptr<const Forecaster>>& algorithms,
                              const ProtocolSpec& spec) {
  spec.validate(series.size());
  require(conditional_mean.empty() || conditional_mean.size() == series.size(), ErrorKind::kLengthMismatch,
          "conditional means must match the series length");
  require(!algorithms.empty(), ErrorKind::kInvalidArgument, "no algorithms to evaluate");

  const std::span<const double> values = series.values();
  const std::size_t n_cuts = spec.schedule.size();
  const std::size_t n_tasks = algorithms.size() * n_cuts;
  std::vector<CellResult> cells(n_tasks);
  const std::size_t threads = spec.threads > 0 ? spec.threads : thread_count_from_env();
  parallel_for(n_tasks, threads, [&](std::size_t task) {
    const std::size_t a = task / n_cuts;
    const std::size_t c = task % n_cuts;
    cells[task] = run_cell(*algorithms[a], values, conditional_mean, spec.schedule[c], spec);
  });

  EvaluationReport report;
  report.cuts = spec.schedule;
  for (std::size_t t : spec.schedule) {
    const auto truth = values.subspan(t, spec.test_horizon);
    report.truth.emplace_back(truth.begin(), truth.end());
  }
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    AlgorithmReport ar;
    ar.name = algorithms[a]->name();
    for (std::size_t c = 0; c < n_cuts; ++c) {
      CellResult& cell = cells[a * n_cuts + c];
      ar.cut_mse.push_back(cell.mse);
      ar.selected.push_back(std::move(cell.selected));
      ar.forecasts.push_back(std::move(cell.forecast));
      ar.weights.push_back(std::move(cell.weights));
    }
    ar.mean_mse = mean(ar.cut_mse);
    ar.std_mse = sample_stddev(ar.cut_mse);
    ar.running_mse = running_mse(ar.cut_mse);
    report.algorithms.push_back(std::move(ar));
  }
  for (std::size_t i = 0; i < report.algorithms.size(); ++i) {
    for (std::size_t j = i + 1; j < report.algorithms.size(); ++j) {
      const auto& a = report.algorithms[i];
      const auto& b = report.algorithms[j];
      report.tests.push_back({a.name, b.name, one_sided_p(a.cut_mse, b.cut_mse), one_sided_p(b.cut_mse, a.cut_mse)});
    }
  }
  return report;
}

}  // namespace dbf
