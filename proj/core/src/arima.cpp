#include "dbf/arima.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace dbf {

std::string ArimaOrder::to_string() const {
  return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

std::vector<double> difference(std::span<const double> values, int d) {
  std::vector<double> out(values.begin(), values.end());
  for (int k = 0; k < d; ++k) {
    if (out.size() < 2) return {};
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return out;
}

std::vector<double> integrate(std::span<const double> history, std::span<const double> diffs, int d) {
  require(static_cast<int>(history.size()) >= d, ErrorKind::kSeriesTooShort, "not enough history to integrate");
  // Last value of each differencing level 0..d-1.
  std::vector<double> anchors(static_cast<std::size_t>(d));
  std::vector<double> level(history.begin(), history.end());
  for (int k = 0; k < d; ++k) {
    anchors[static_cast<std::size_t>(k)] = level.back();
    level = difference(level, 1);
  }
  std::vector<double> out;
  out.reserve(diffs.size());
  for (double value : diffs) {
    for (int k = d - 1; k >= 0; --k) {
      value += anchors[static_cast<std::size_t>(k)];
      anchors[static_cast<std::size_t>(k)] = value;
    }
    out.push_back(value);
  }
  return out;
}

std::vector<double> css_innovations(const ArimaModel& model, std::span<const double> z) {
  const int p = model.order.p;
  const int q = model.order.q;
  std::vector<double> e(z.size(), 0.0);
  for (std::size_t t = static_cast<std::size_t>(p); t < z.size(); ++t) {
    double pred = model.intercept;
    for (int i = 1; i <= p; ++i) pred += model.phi[i - 1] * z[t - static_cast<std::size_t>(i)];
    for (int j = 1; j <= q && static_cast<std::size_t>(j) <= t; ++j) {
      pred += model.theta[j - 1] * e[t - static_cast<std::size_t>(j)];
    }
    e[t] = z[t] - pred;
  }
  return e;
}

double css_objective(const ArimaModel& model, std::span<const double> z) {
  const std::vector<double> e = css_innovations(model, z);
  double total = 0.0;
  for (std::size_t t = static_cast<std::size_t>(model.order.p); t < e.size(); ++t) total += e[t] * e[t];
  return total;
}

namespace {

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& start, int max_evals,
                             double tol) {
  const Eigen::Index n = start.size();
  std::vector<Vector> simplex;
  std::vector<double> values;
  simplex.push_back(start);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector v = start;
    v[i] += std::abs(start[i]) > 1e-3 ? 0.1 * std::abs(start[i]) : 0.05;
    simplex.push_back(v);
  }
  int evals = 0;
  for (const auto& v : simplex) {
    values.push_back(f(v));
    ++evals;
  }
  std::vector<std::size_t> idx(simplex.size());
  bool converged = false;
  while (evals < max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = idx.front();
    const std::size_t worst = idx.back();
    const std::size_t second = idx[idx.size() - 2];
    double size = 0.0;
    for (const auto& v : simplex) size = std::max(size, (v - simplex[best]).cwiseAbs().maxCoeff());
    if (values[worst] - values[best] <= tol * (std::abs(values[best]) + tol) || size <= tol) {
      converged = true;
      break;
    }
    Vector centroid = Vector::Zero(n);
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k != worst) centroid += simplex[k];
    }
    centroid /= static_cast<double>(n);

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double fr = f(reflected);
    ++evals;
    if (fr < values[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Vector contracted =
        outside ? Vector(centroid + 0.5 * (reflected - centroid)) : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(contracted);
    ++evals;
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = simplex[best] + 0.5 * (simplex[k] - simplex[best]);
      values[k] = f(simplex[k]);
      ++evals;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], converged};
}

constexpr int kMaxEvaluations = 2000;
constexpr double kSimplexTol = 1e-10;
constexpr double kThetaBound = 5.0;

void unpack(const Vector& x, bool with_mean, ArimaModel& m) {
  Eigen::Index k = 0;
  m.intercept = with_mean ? x[k++] : 0.0;
  for (int i = 0; i < m.order.p; ++i) m.phi[i] = x[k++];
  for (int j = 0; j < m.order.q; ++j) m.theta[j] = x[k++];
}

}  // namespace

ArimaModel fit_arima(const TimeSeries& series, const ArimaOrder& order) {
  require(order.p >= 0 && order.d >= 0 && order.q >= 0, ErrorKind::kInvalidArgument, "ARIMA orders must be >= 0");
  const auto needed = static_cast<std::size_t>(order.p + order.d + order.q + 10);
  if (series.size() <= needed) {
    fail(ErrorKind::kSeriesTooShort, "ARIMA" + order.to_string() + " needs more than " + std::to_string(needed) +
                                         " observations, got " + std::to_string(series.size()));
  }
  const std::vector<double> z = difference(series.values(), order.d);
  const bool with_mean = order.d == 0;

  ArimaModel model;
  model.order = order;
  model.phi = Vector::Zero(order.p);
  model.theta = Vector::Zero(order.q);

  // OLS warm start (exact answer for pure AR orders).
  const std::size_t rows = z.size() - static_cast<std::size_t>(order.p);
  const Eigen::Index cols = (with_mean ? 1 : 0) + order.p;
  if (cols > 0) {
    Matrix x(static_cast<Eigen::Index>(rows), cols);
    Vector y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t t = r + static_cast<std::size_t>(order.p);
      Eigen::Index c = 0;
      if (with_mean) x(static_cast<Eigen::Index>(r), c++) = 1.0;
      for (int i = 1; i <= order.p; ++i) x(static_cast<Eigen::Index>(r), c++) = z[t - static_cast<std::size_t>(i)];
      y[static_cast<Eigen::Index>(r)] = z[t];
    }
    const Vector beta = x.colPivHouseholderQr().solve(y);
    Eigen::Index c = 0;
    if (with_mean) model.intercept = beta[c++];
    for (int i = 0; i < order.p; ++i) model.phi[i] = beta[c++];
  }

  if (order.q > 0) {
    Vector start(cols + order.q);
    start.head(cols).setZero();
    Eigen::Index k = 0;
    if (with_mean) start[k++] = model.intercept;
    for (int i = 0; i < order.p; ++i) start[k++] = model.phi[i];
    start.tail(order.q).setZero();

    ArimaModel trial = model;
    const double start_value = css_objective(model, z);
    const double penalty_scale = 1e6 * std::max(start_value, 1e-12);
    auto objective = [&](const Vector& x) {
      unpack(x, with_mean, trial);
      double penalty = 0.0;
      for (int j = 0; j < order.q; ++j) {
        const double excess = std::abs(trial.theta[j]) - kThetaBound;
        if (excess > 0.0) penalty += penalty_scale * excess * excess;
      }
      const double v = css_objective(trial, z) + penalty;
      return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    const NelderMeadResult nm = nelder_mead(objective, start, kMaxEvaluations, kSimplexTol);
    if (nm.value <= objective(start)) unpack(nm.x, with_mean, model);
    model.converged = nm.converged;
  }

  model.css = css_objective(model, z);
  model.sigma2 = model.css / static_cast<double>(std::max<std::size_t>(rows, 1));
  return model;
}

std::vector<double> forecast_arima(const ArimaModel& model, const TimeSeries& series, std::size_t horizon) {
  require(horizon >= 1, ErrorKind::kInvalidArgument, "forecast horizon must be >= 1");
  const int p = model.order.p;
  const int q = model.order.q;
  std::vector<double> z = difference(series.values(), model.order.d);
  std::vector<double> e = css_innovations(model, z);
  const std::size_t n = z.size();
  for (std::size_t h = 0; h < horizon; ++h) {
    const std::size_t t = n + h;
    double pred = model.intercept;
    for (int i = 1; i <= p; ++i) {
      if (static_cast<std::size_t>(i) <= t) pred += model.phi[i - 1] * z[t - static_cast<std::size_t>(i)];
    }
    for (int j = 1; j <= q; ++j) {
      if (static_cast<std::size_t>(j) <= t) pred += model.theta[j - 1] * e[t - static_cast<std::size_t>(j)];
    }
    z.push_back(pred);
    e.push_back(0.0);
  }
  const std::span<const double> future(z.data() + n, horizon);
  return integrate(series.values(), future, model.order.d);
}

}  // namespace dbf
