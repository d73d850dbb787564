#include <cmath>

#include <gtest/gtest.h>

#include "dbf/datagen.hpp"
#include "dbf/stats.hpp"

namespace dbf {
namespace {

TEST(SplitMix64, ReferenceOutputs) {
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

TEST(SplitMix64, UniformStaysInsideTheUnitInterval) {
  SplitMix64 rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SplitMix64, NormalMoments) {
  SplitMix64 rng(10);
  std::vector<double> z(200000);
  for (double& v : z) v = rng.normal();
  EXPECT_NEAR(mean(z), 0.0, 0.01);
  EXPECT_NEAR(sample_stddev(z), 1.0, 0.01);
}

TEST(Datagen, Deterministic) {
  const GeneratedSeries a = generate({DatasetKind::kAds3, 500, 42});
  const GeneratedSeries b = generate({DatasetKind::kAds3, 500, 42});
  const GeneratedSeries c = generate({DatasetKind::kAds3, 500, 43});
  EXPECT_TRUE(std::equal(a.series.values().begin(), a.series.values().end(), b.series.values().begin()));
  EXPECT_NE(a.series[10], c.series[10]);
}

TEST(Datagen, Coefficients) {
  EXPECT_EQ(ads_coefficient(DatasetKind::kAds1, 999), 0.9);
  EXPECT_EQ(ads_coefficient(DatasetKind::kAds1, 1000), -0.9);
  EXPECT_EQ(ads_coefficient(DatasetKind::kAds1, 2000), -0.9);
  EXPECT_EQ(ads_coefficient(DatasetKind::kAds1, 2001), 0.9);
  EXPECT_DOUBLE_EQ(ads_coefficient(DatasetKind::kAds2, 750), 0.5);
  EXPECT_DOUBLE_EQ(ads_coefficient(DatasetKind::kAds2, 3000), -1.0);
  EXPECT_EQ(ads_coefficient(DatasetKind::kAds4, 17), -0.5);
}

TEST(Datagen, ConditionalMeansTrackThePreviousValue) {
  const GeneratedSeries g = generate({DatasetKind::kAds2, 100, 5});
  EXPECT_EQ(g.conditional_mean[0], 0.0);
  for (std::size_t t = 2; t <= 100; ++t) {
    EXPECT_DOUBLE_EQ(g.conditional_mean[t - 1], ads_coefficient(DatasetKind::kAds2, t) * g.series[t - 2]);
  }
}

double lag1_autocorrelation(std::span<const double> y) {
  const double m = mean(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    den += (y[i] - m) * (y[i] - m);
    if (i > 0) num += (y[i] - m) * (y[i - 1] - m);
  }
  return num / den;
}

TEST(Datagen, Ads1AutocorrelationFlips) {
  const GeneratedSeries g = generate({DatasetKind::kAds1, 3000, 1});
  const auto y = g.series.values();
  EXPECT_GT(lag1_autocorrelation(y.subspan(0, 999)), 0.5);
  EXPECT_LT(lag1_autocorrelation(y.subspan(1000, 1000)), -0.5);
  EXPECT_GT(lag1_autocorrelation(y.subspan(2001)), 0.5);
}

TEST(Datagen, Ads4StationaryVariance) {
  const GeneratedSeries g = generate({DatasetKind::kAds4, 200000, 7});
  const double v = sample_stddev(g.series.values());
  // sigma^2 / (1 - alpha^2) = 0.0025 / 0.75.
  EXPECT_NEAR(v * v, 0.0025 / 0.75, 0.1 * 0.0025 / 0.75);
}

TEST(Datagen, Ads3RegimesSwitchRarely) {
  const GeneratedSeries g = generate({DatasetKind::kAds3, 3000, 2});
  ASSERT_EQ(g.hidden_states.size(), 3000u);
  EXPECT_EQ(g.hidden_states[0], 1);
  int switches = 0;
  for (std::size_t t = 1; t < 3000; ++t) switches += g.hidden_states[t] != g.hidden_states[t - 1];
  EXPECT_LT(switches, 20);
}

TEST(Datagen, MarkovStepsAreNeighbours) {
  const std::vector<int> path = generate_markov(5, 0.3, 1000, 11, 2);
  EXPECT_EQ(path[0], 2);
  int left = 0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    const int step = (path[t] - path[t - 1] + 5) % 5;
    ASSERT_TRUE(step == 1 || step == 4);
    left += step == 4;
  }
  EXPECT_NEAR(left / 999.0, 0.3, 0.05);
}

TEST(Datagen, RejectsBadSpecs) {
  EXPECT_THROW(generate({DatasetKind::kAds1, 1, 1}), Error);
  EXPECT_THROW(generate({DatasetKind::kAds1, 100, 1, -1.0}), Error);
  EXPECT_THROW(generate_markov(1, 0.5, 10, 1), Error);
  EXPECT_FALSE(parse_dataset("ads9").has_value());
  EXPECT_EQ(parse_dataset("ads2"), DatasetKind::kAds2);
  EXPECT_EQ(to_string(DatasetKind::kAds4), "ads4");
}

}  // namespace
}  // namespace dbf
