#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "dbf/datagen.hpp"
#include "dbf/forecasters.hpp"
#include "dbf/protocol.hpp"
#include "dbf/stats.hpp"

namespace dbf {
namespace {

// Knows the whole series and returns the true next value.
class PeekingForecaster : public Forecaster {
 public:
  explicit PeekingForecaster(std::vector<double> series) : series_(std::move(series)) {}

  std::string name() const override { return "peek"; }
  std::vector<HyperParams> grid() const override { return {{}}; }

  std::unique_ptr<PreparedTraining> prepare(const TrainingWindow&) const override {
    struct Prepared : PreparedTraining {
      const std::vector<double>* series;
      std::unique_ptr<Predictor> fit(const HyperParams&) const override {
        struct P : Predictor {
          const std::vector<double>* series;
          double predict_next(std::span<const double> history) const override { return (*series)[history.size()]; }
        };
        auto p = std::make_unique<P>();
        p->series = series;
        return p;
      }
    };
    auto prep = std::make_unique<Prepared>();
    prep->series = &series_;
    return prep;
  }

 private:
  std::vector<double> series_;
};

// Predicts the constant "c"; throws for c < 0.
class ConstantForecaster : public Forecaster {
 public:
  explicit ConstantForecaster(std::vector<double> values) : values_(std::move(values)) {}

  std::string name() const override { return "const"; }
  std::vector<HyperParams> grid() const override {
    std::vector<HyperParams> g;
    for (double c : values_) g.push_back({{"c", c}});
    return g;
  }

  std::unique_ptr<PreparedTraining> prepare(const TrainingWindow&) const override {
    struct Prepared : PreparedTraining {
      std::unique_ptr<Predictor> fit(const HyperParams& params) const override {
        const double c = params.at("c");
        if (c < 0) fail(ErrorKind::kNumericalFailure, "negative constant");
        struct P : Predictor {
          double c = 0.0;
          double predict_next(std::span<const double>) const override { return c; }
        };
        auto p = std::make_unique<P>();
        p->c = c;
        return p;
      }
    };
    return std::make_unique<Prepared>();
  }

 private:
  std::vector<double> values_;
};

ProtocolSpec small_spec(std::size_t length) {
  ProtocolSpec spec;
  spec.schedule = default_schedule(length, 100, 50, 25);
  spec.threads = 1;
  return spec;
}

TEST(Protocol, DefaultSchedule) {
  const std::vector<std::size_t> s = default_schedule(3000);
  ASSERT_EQ(s.size(), 90u);
  EXPECT_EQ(s.front(), 750u);
  EXPECT_EQ(s[1], 775u);
  EXPECT_EQ(s.back(), 2975u);
}

TEST(Protocol, ValidateRejectsInfeasibleCuts) {
  ProtocolSpec spec;
  spec.schedule = {990};
  EXPECT_THROW(spec.validate(1000), Error);
  spec.schedule = {20};
  EXPECT_THROW(spec.validate(1000), Error);
  spec.schedule = {975};
  EXPECT_NO_THROW(spec.validate(1000));
}

TEST(Protocol, PerfectPredictorScoresZero) {
  const GeneratedSeries g = generate({DatasetKind::kAds1, 400, 1});
  const std::vector<double> y(g.series.values().begin(), g.series.values().end());
  for (bool recursive : {true, false}) {
    ProtocolSpec spec = small_spec(400);
    spec.recursive_test = recursive;
    const EvaluationReport r = run_protocol(g.series, g.conditional_mean,
                                            {std::make_shared<PeekingForecaster>(y)}, spec);
    for (double m : r.algorithms[0].cut_mse) EXPECT_EQ(m, 0.0);
  }
}

TEST(Protocol, ZeroSeriesWithZeroForecaster) {
  const TimeSeries series(std::vector<double>(300, 0.0));
  const EvaluationReport r = run_protocol(series, {}, {make_forecaster("zero")}, small_spec(300));
  EXPECT_EQ(r.algorithms[0].mean_mse, 0.0);
  EXPECT_EQ(r.algorithms[0].std_mse, 0.0);
}

TEST(Protocol, SelectsTheBestGridPoint) {
  const TimeSeries series(std::vector<double>(300, 1.0));
  const EvaluationReport r =
      run_protocol(series, {}, {std::make_shared<ConstantForecaster>(std::vector<double>{0.0, -1.0, 1.0, 2.0})},
                   small_spec(300));
  for (const HyperParams& p : r.algorithms[0].selected) EXPECT_EQ(p.at("c"), 1.0);
  EXPECT_EQ(r.algorithms[0].mean_mse, 0.0);
}

TEST(Protocol, FirstGridPointWinsTies) {
  const TimeSeries series(std::vector<double>(300, 1.0));
  const EvaluationReport r =
      run_protocol(series, {}, {std::make_shared<ConstantForecaster>(std::vector<double>{0.0, 2.0})},
                   small_spec(300));
  for (const HyperParams& p : r.algorithms[0].selected) EXPECT_EQ(p.at("c"), 0.0);
}

TEST(Protocol, FailedCellsScoreInfinity) {
  const TimeSeries series(std::vector<double>(300, 1.0));
  const EvaluationReport r = run_protocol(
      series, {}, {std::make_shared<ConstantForecaster>(std::vector<double>{-1.0}), make_forecaster("zero")},
      small_spec(300));
  for (double m : r.algorithm("const").cut_mse) EXPECT_TRUE(std::isinf(m));
  ASSERT_EQ(r.tests.size(), 1u);
  EXPECT_FALSE(r.tests[0].p_a_less_b.has_value());
}

TEST(Protocol, SingleGridPointEqualsDirectFit) {
  const GeneratedSeries g = generate({DatasetKind::kAds2, 400, 3});
  ForecasterOptions options;
  options.grid = {{{"lambda1", 1e-3}}};
  const auto ridge = make_forecaster("ridge", options);
  const ProtocolSpec spec = small_spec(400);
  const EvaluationReport r = run_protocol(g.series, g.conditional_mean, {ridge}, spec);
  const auto y = g.series.values();
  for (std::size_t k = 0; k < r.cuts.size(); ++k) {
    const std::size_t t = r.cuts[k];
    const auto predictor = ridge->prepare({y.subspan(0, t), std::span<const double>(g.conditional_mean).subspan(0, t)})
                               ->fit(options.grid[0]);
    const std::vector<double> f = predictor->forecast(y.subspan(0, t), spec.test_horizon);
    EXPECT_EQ(f, r.algorithms[0].forecasts[k]);
    EXPECT_DOUBLE_EQ(mse(f, y.subspan(t, spec.test_horizon)), r.algorithms[0].cut_mse[k]);
  }
}

TEST(Protocol, ThreadCountDoesNotChangeResults) {
  const GeneratedSeries g = generate({DatasetKind::kAds3, 400, 4});
  const std::vector<std::shared_ptr<const Forecaster>> algs{make_forecaster("ridge"), make_forecaster("arima"),
                                                            make_forecaster("two-stage")};
  ProtocolSpec one = small_spec(400);
  ProtocolSpec many = one;
  many.threads = 4;
  const EvaluationReport a = run_protocol(g.series, g.conditional_mean, algs, one);
  const EvaluationReport b = run_protocol(g.series, g.conditional_mean, algs, many);
  for (std::size_t i = 0; i < algs.size(); ++i) {
    EXPECT_EQ(a.algorithms[i].cut_mse, b.algorithms[i].cut_mse);
    EXPECT_EQ(a.algorithms[i].selected, b.algorithms[i].selected);
    EXPECT_EQ(a.algorithms[i].forecasts, b.algorithms[i].forecasts);
  }
}

TEST(Protocol, SummaryStatistics) {
  const GeneratedSeries g = generate({DatasetKind::kAds4, 500, 5});
  const EvaluationReport r =
      run_protocol(g.series, g.conditional_mean, {make_forecaster("ridge"), make_forecaster("zero")}, small_spec(500));
  for (const AlgorithmReport& a : r.algorithms) {
    EXPECT_DOUBLE_EQ(a.mean_mse, std::accumulate(a.cut_mse.begin(), a.cut_mse.end(), 0.0) / a.cut_mse.size());
    EXPECT_DOUBLE_EQ(a.std_mse, sample_stddev(a.cut_mse));
    EXPECT_EQ(a.running_mse, running_mse(a.cut_mse));
  }
  ASSERT_EQ(r.tests.size(), 1u);
  EXPECT_EQ(r.tests[0].a, "ridge");
  EXPECT_EQ(r.tests[0].b, "zero");
  EXPECT_TRUE(r.tests[0].p_a_less_b.has_value());
  EXPECT_NEAR(*r.tests[0].p_a_less_b + *r.tests[0].p_b_less_a, 1.0, 1e-12);
}

TEST(Forecasters, KnownNamesAndGrids) {
  for (const std::string& name : forecaster_names()) EXPECT_EQ(make_forecaster(name)->name(), name);
  EXPECT_THROW(make_forecaster("prophet"), Error);
  EXPECT_EQ(dbf_grid().size(), 32u);
  EXPECT_EQ(ridge_grid().size(), 4u);
  EXPECT_EQ(two_stage_grid().size(), 4u);
  EXPECT_EQ(arima_grid().size(), 27u);
}

TEST(Forecasters, TrueDiscrepancyNeedsConditionalMeans) {
  const GeneratedSeries g = generate({DatasetKind::kAds1, 200, 1});
  EXPECT_THROW(make_forecaster("tdbf")->prepare({g.series.values(), {}}), Error);
  EXPECT_NO_THROW(make_forecaster("tdbf")->prepare({g.series.values(), g.conditional_mean}));
}

TEST(Forecasters, DefaultRadiusIsTwiceTheRidgeNorm) {
  const RegressionDataset zero(Matrix::Zero(5, 2), Vector::Zero(5), 2);
  EXPECT_EQ(default_radius(zero, KernelSpec::linear()), 1.0);
  const RegressionDataset one((Matrix(1, 1) << 1).finished(), (Vector(1) << 3).finished(), 1);
  EXPECT_NEAR(default_radius(one, KernelSpec::linear()), 6.0, 1e-4);
}

}  // namespace
}  // namespace dbf
