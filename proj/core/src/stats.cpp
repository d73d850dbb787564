#include "dbf/stats.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "dbf/error.hpp"

namespace dbf {

double mse(std::span<const double> predictions, std::span<const double> truth) {
  require(predictions.size() == truth.size(), ErrorKind::kLengthMismatch, "mse inputs must have equal length");
  require(!truth.empty(), ErrorKind::kInvalidArgument, "mse of an empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double r = predictions[i] - truth[i];
    total += r * r;
  }
  return total / static_cast<double>(truth.size());
}

std::vector<double> running_mse(std::span<const double> squared_errors) {
  std::vector<double> out;
  out.reserve(squared_errors.size());
  double total = 0.0;
  for (std::size_t i = 0; i < squared_errors.size(); ++i) {
    total += squared_errors[i];
    out.push_back(total / static_cast<double>(i + 1));
  }
  return out;
}

double mean(std::span<const double> values) {
  require(!values.empty(), ErrorKind::kInvalidArgument, "mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  fail(ErrorKind::kNumericalFailure, "incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  require(a > 0.0 && b > 0.0, ErrorKind::kInvalidArgument, "incomplete beta needs a, b > 0");
  require(x >= 0.0 && x <= 1.0, ErrorKind::kInvalidArgument, "incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  require(dof > 0.0, ErrorKind::kInvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b, Alternative alternative) {
  require(a.size() == b.size(), ErrorKind::kLengthMismatch, "paired samples must have equal length");
  require(a.size() >= 2, ErrorKind::kInvalidArgument, "paired t-test needs at least two pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  TTestResult out;
  out.n = diff.size();
  out.mean_difference = mean(diff);
  const double sd = sample_stddev(diff);
  if (sd == 0.0) {
    if (out.mean_difference == 0.0) fail(ErrorKind::kDegenerateSample, "all paired differences are zero");
    out.statistic = std::copysign(std::numeric_limits<double>::infinity(), out.mean_difference);
  } else {
    out.statistic = out.mean_difference / (sd / std::sqrt(static_cast<double>(out.n)));
  }
  const double dof = static_cast<double>(out.n - 1);
  const double lower = student_t_cdf(out.statistic, dof);
  out.p_value = alternative == Alternative::kLess ? lower : 1.0 - lower;
  return out;
}

}  // namespace dbf
