#include "dbf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dbf/lp.hpp"
#include "dbf/trs.hpp"

namespace dbf {

void SolverConfig::validate() const {
  require(lambda1 >= 0.0 && std::isfinite(lambda1), ErrorKind::kInvalidArgument, "lambda1 must be >= 0");
  require(lambda2 >= 0.0 && std::isfinite(lambda2), ErrorKind::kInvalidArgument, "lambda2 must be >= 0");
  require(radius > 0.0 && std::isfinite(radius), ErrorKind::kInvalidArgument, "radius must be > 0");
  require(norm_p >= 1.0, ErrorKind::kInvalidArgument, "norm exponent must be >= 1");
  require(tol > 0.0, ErrorKind::kInvalidArgument, "tol must be > 0");
  require(max_iters >= 1, ErrorKind::kInvalidArgument, "max_iters must be >= 1");
}

WeightVector SolverConfig::prior_for(std::size_t n) const {
  if (!prior) return WeightVector::uniform(n);
  require(prior->size() == n, ErrorKind::kLengthMismatch, "prior length must match the dataset");
  return *prior;
}

namespace {

Vector solve_spd(const Matrix& m, const Vector& rhs, bool allow_singular_check) {
  Eigen::LDLT<Matrix> ldlt(m);
  if (ldlt.info() != Eigen::Success) fail(ErrorKind::kSingularSystem, "normal equations could not be factored");
  if (allow_singular_check) {
    const Vector diag = ldlt.vectorD().cwiseAbs();
    if (diag.size() > 0 && diag.minCoeff() <= 1e-12 * std::max(diag.maxCoeff(), 1e-300)) {
      fail(ErrorKind::kSingularSystem, "normal equations are rank deficient");
    }
  }
  return ldlt.solve(rhs);
}

Vector squared_residuals(const Matrix& phi, const Vector& y, const Vector& w) {
  return (phi * w - y).array().square().matrix();
}

Coefficients to_coefficients(const FeatureMatrix& fm, const Vector& w) {
  if (fm.input_space) return PrimalCoefficients{fm.coefficient_map * w};
  return DualCoefficients{fm.coefficient_map * w, 1.0};
}

double lp_norm(const Vector& x, double p) {
  if (p == 1.0) return x.cwiseAbs().sum();
  return std::pow(x.array().abs().pow(p).sum(), 1.0 / p);
}

double r_penalty(const Vector& r, const Vector& v, double lambda2, double p) {
  double total = 0.0;
  for (Eigen::Index t = 0; t < r.size(); ++t) {
    total += std::pow(v[t], p) * std::pow(std::abs(r[t] - 1.0 / v[t]), p);
  }
  return lambda2 * total;
}

// g(r) = sum_t cost_t / r_t + penalty(r), minimized over r_t >= 1 by projected
// gradient steps scaled with the diagonal Hessian, Armijo backtracking.
Vector r_step(const Vector& cost, const Vector& r0, const Vector& v, const SolverConfig& config) {
  const double p = config.norm_p;
  auto g = [&](const Vector& r) {
    return (cost.array() / r.array()).sum() + r_penalty(r, v, config.lambda2, p);
  };
  Vector r = r0;
  double current = g(r);
  for (int inner = 0; inner < 50; ++inner) {
    Vector grad(r.size());
    Vector direction(r.size());
    for (Eigen::Index t = 0; t < r.size(); ++t) {
      const double gap = r[t] - 1.0 / v[t];
      const double vp = std::pow(v[t], p);
      const double sign = gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0);
      grad[t] = -cost[t] / (r[t] * r[t]) + config.lambda2 * p * vp * std::pow(std::abs(gap), p - 1.0) * sign;
      double h = 2.0 * cost[t] / (r[t] * r[t] * r[t]);
      if (p == 2.0) {
        h += 2.0 * config.lambda2 * vp;
      } else if (p > 1.0 && gap != 0.0) {
        h += config.lambda2 * p * (p - 1.0) * vp * std::pow(std::abs(gap), p - 2.0);
      }
      direction[t] = -grad[t] / std::max(h, 1e-300);
    }
    double step = 1.0;
    bool accepted = false;
    Vector candidate;
    double value = current;
    for (int k = 0; k < 60; ++k) {
      candidate = (r + step * direction).cwiseMax(1.0);
      value = g(candidate);
      if (value <= current + 1e-4 * grad.dot(candidate - r)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || !(value < current)) break;
    const double decrease = current - value;
    r = candidate;
    current = value;
    if (decrease <= config.tol * std::max(1.0, std::abs(current))) break;
  }
  return r;
}

struct FeatureProblem {
  FeatureMatrix fm;
  Vector y;
  Vector d;
};

FeatureProblem prepare(const RegressionDataset& data, const KernelSpec& kernel, const InstantDiscrepancies& d) {
  require(d.d.size() == static_cast<Eigen::Index>(data.rows()), ErrorKind::kLengthMismatch,
          "discrepancies must match the dataset");
  return {sample_features(kernel, data.features), data.targets, d.d};
}

InstantDiscrepancies estimate_discrepancies(const RegressionDataset& data, const KernelSpec& kernel,
                                            const SolverConfig& config) {
  const TargetProxy proxy = target_proxy(data.rows(), std::min(config.s, data.rows()));
  return instantaneous_discrepancies(data, kernel, BallConstraint(config.radius), proxy, config.window);
}

}  // namespace

Vector weighted_ridge_features(const Matrix& phi, const Vector& y, const Vector& weights, double lambda1) {
  require(phi.rows() == y.size() && weights.size() == y.size(), ErrorKind::kLengthMismatch,
          "ridge inputs must have matching lengths");
  require(lambda1 >= 0.0, ErrorKind::kInvalidArgument, "lambda1 must be >= 0");
  require((weights.array() >= 0.0).all(), ErrorKind::kInvalidArgument, "ridge weights must be non-negative");
  Matrix normal = phi.transpose() * weights.asDiagonal() * phi;
  normal.diagonal().array() += lambda1;
  const Vector rhs = phi.transpose() * (weights.array() * y.array()).matrix();
  if (lambda1 == 0.0) {
    Eigen::FullPivLU<Matrix> lu(normal);
    lu.setThreshold(1e-12);
    if (lu.rank() < normal.rows()) fail(ErrorKind::kSingularSystem, "weighted design is rank deficient at lambda1 = 0");
    return lu.solve(rhs);
  }
  return solve_spd(normal, rhs, false);
}

Vector weighted_ridge_primal(const RegressionDataset& data, const WeightVector& q, double lambda1) {
  require(q.size() == data.rows(), ErrorKind::kLengthMismatch, "weights must match the dataset");
  return weighted_ridge_features(data.features, data.targets, q.values(), lambda1);
}

DualRidge weighted_ridge_dual(const GramMatrix& g, const WeightVector& q, double lambda1, const Vector& y) {
  const Matrix& k = g.entries;
  require(k.rows() == k.cols() && k.rows() == y.size() && static_cast<Eigen::Index>(q.size()) == y.size(),
          ErrorKind::kLengthMismatch, "dual ridge inputs must have matching sizes");
  require(lambda1 > 0.0, ErrorKind::kInvalidArgument, "dual ridge needs lambda1 > 0");
  require((q.values().array() > 0.0).all(), ErrorKind::kInvalidArgument, "dual ridge needs q > 0");
  const Vector inv_q = q.values().cwiseInverse();
  Matrix m = k;
  m.diagonal() += lambda1 * inv_q;
  DualRidge out;
  out.alpha = solve_spd(m, lambda1 * y, false);
  out.scale = 1.0 / lambda1;
  out.objective = -lambda1 * (inv_q.array() * out.alpha.array().square()).sum() - out.alpha.dot(k * out.alpha) +
                  2.0 * lambda1 * out.alpha.dot(y);
  return out;
}

WeightVector q_step_closed_form(const Vector& losses, const InstantDiscrepancies& d, const SolverConfig& config) {
  require(losses.size() == d.d.size(), ErrorKind::kLengthMismatch, "losses and discrepancies must match");
  const auto n = static_cast<std::size_t>(losses.size());
  const WeightVector v = config.prior_for(n);
  const Vector cost = losses + d.d;
  Eigen::Index best = 0;
  for (Eigen::Index t = 1; t < cost.size(); ++t) {
    if (cost[t] < cost[best]) best = t;
  }
  // Moving a unit of mass from t to the cheapest point saves cost_t - cost_best
  // and costs 2 * lambda2 in the l1 penalty.
  Vector q = v.values();
  double moved = 0.0;
  for (Eigen::Index t = 0; t < cost.size(); ++t) {
    if (t == best) continue;
    if (cost[t] - cost[best] >= 2.0 * config.lambda2 && q[t] > 0.0) {
      moved += q[t];
      q[t] = 0.0;
    }
  }
  q[best] += moved;
  return WeightVector(q / q.sum(), true);
}

WeightVector q_step_lp(const Vector& losses, const InstantDiscrepancies& d, const SolverConfig& config) {
  require(losses.size() == d.d.size(), ErrorKind::kLengthMismatch, "losses and discrepancies must match");
  const Eigen::Index n = losses.size();
  const WeightVector v = config.prior_for(static_cast<std::size_t>(n));
  // Variables (q, s): s_t >= |q_t - v_t|.
  LinearProgram lp;
  lp.c = Vector::Zero(2 * n);
  lp.c.head(n) = losses + d.d;
  lp.c.tail(n).setConstant(config.lambda2);
  lp.A_ub = Matrix::Zero(2 * n, 2 * n);
  lp.b_ub = Vector::Zero(2 * n);
  for (Eigen::Index t = 0; t < n; ++t) {
    lp.A_ub(t, t) = 1.0;
    lp.A_ub(t, n + t) = -1.0;
    lp.b_ub[t] = v[static_cast<std::size_t>(t)];
    lp.A_ub(n + t, t) = -1.0;
    lp.A_ub(n + t, n + t) = -1.0;
    lp.b_ub[n + t] = -v[static_cast<std::size_t>(t)];
  }
  lp.A_eq = Matrix::Zero(1, 2 * n);
  lp.A_eq.row(0).head(n).setOnes();
  lp.b_eq = Vector::Ones(1);
  const LpResult res = solve_lp(lp);
  if (res.status != LpStatus::kOptimal) {
    fail(ErrorKind::kNumericalFailure, std::string("q-step LP returned status ") + to_string(res.status));
  }
  Vector q = res.x.head(n).cwiseMax(0.0);
  return WeightVector(q / q.sum(), true);
}

WeightVector q_step(const Vector& losses, const InstantDiscrepancies& d, const SolverConfig& config) {
  require(config.norm_p == 1.0, ErrorKind::kInvalidArgument, "the LP q-step requires norm_p = 1");
  // Without the penalty the LP is degenerate across tied minima; the closed
  // form returns the lowest-index vertex.
  if (config.lambda2 == 0.0) return q_step_closed_form(losses, d, config);
  if (static_cast<std::size_t>(losses.size()) <= config.lp_max_size) return q_step_lp(losses, d, config);
  return q_step_closed_form(losses, d, config);
}

double alternating_objective(const Matrix& phi, const Vector& y, const Vector& d, const WeightVector& q,
                             const Vector& w, const SolverConfig& config) {
  const WeightVector v = config.prior_for(q.size());
  const Vector losses = squared_residuals(phi, y, w);
  return q.values().dot(losses + d) + config.lambda1 * w.squaredNorm() +
         config.lambda2 * lp_norm(q.values() - v.values(), config.norm_p);
}

double convex_objective(const Matrix& phi, const Vector& y, const Vector& d, const Vector& r, const Vector& w,
                        const SolverConfig& config) {
  const WeightVector v = config.prior_for(static_cast<std::size_t>(r.size()));
  const Vector losses = squared_residuals(phi, y, w);
  return ((losses + d).array() / r.array()).sum() + config.lambda1 * w.squaredNorm() +
         r_penalty(r, v.values(), config.lambda2, config.norm_p);
}

FitResult fit_dbf_alternating(const RegressionDataset& data, const KernelSpec& kernel,
                              const InstantDiscrepancies& d, const SolverConfig& config) {
  config.validate();
  require(config.norm_p == 1.0, ErrorKind::kInvalidArgument, "alternating DBF uses norm_p = 1");
  const FeatureProblem prob = prepare(data, kernel, d);
  const Matrix& phi = prob.fm.phi;
  const WeightVector v = config.prior_for(data.rows());

  WeightVector q = v;
  Vector w = weighted_ridge_features(phi, prob.y, q.values(), config.lambda1);
  double objective = alternating_objective(phi, prob.y, prob.d, q, w, config);

  FitResult out;
  out.objective_trace.push_back(objective);
  for (int it = 1; it <= config.max_iters; ++it) {
    out.iterations = it;
    const Vector losses = squared_residuals(phi, prob.y, w);
    WeightVector q_next = q_step(losses, InstantDiscrepancies{prob.d, d.window}, config);
    if (alternating_objective(phi, prob.y, prob.d, q_next, w, config) > objective) q_next = q;
    Vector w_next = weighted_ridge_features(phi, prob.y, q_next.values(), config.lambda1);
    double next = alternating_objective(phi, prob.y, prob.d, q_next, w_next, config);
    const double at_old_w = alternating_objective(phi, prob.y, prob.d, q_next, w, config);
    if (next > at_old_w) {
      w_next = w;
      next = at_old_w;
    }
    const double decrease = objective - next;
    q = std::move(q_next);
    w = std::move(w_next);
    objective = next;
    out.objective_trace.push_back(objective);
    if (decrease < config.tol * (1.0 + std::abs(objective))) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = to_coefficients(prob.fm, w);
  out.q = q;
  out.discrepancies = prob.d;
  out.radius = config.radius;
  return out;
}

FitResult fit_dbf_alternating(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config) {
  return fit_dbf_alternating(data, kernel, estimate_discrepancies(data, kernel, config), config);
}

FitResult fit_dbf_convex(const RegressionDataset& data, const KernelSpec& kernel, const InstantDiscrepancies& d,
                         const SolverConfig& config) {
  config.validate();
  const FeatureProblem prob = prepare(data, kernel, d);
  const Matrix& phi = prob.fm.phi;
  const Vector v = config.prior_for(data.rows()).values();
  require((v.array() > 0.0).all(), ErrorKind::kInvalidArgument, "convex DBF needs a strictly positive prior");

  Vector r = v.cwiseInverse().cwiseMax(1.0);
  Vector w = weighted_ridge_features(phi, prob.y, r.cwiseInverse(), config.lambda1);
  double objective = convex_objective(phi, prob.y, prob.d, r, w, config);

  FitResult out;
  out.objective_trace.push_back(objective);
  for (int it = 1; it <= config.max_iters; ++it) {
    out.iterations = it;
    const Vector cost = squared_residuals(phi, prob.y, w) + prob.d;
    Vector r_next = r_step(cost, r, v, config);
    Vector w_next = weighted_ridge_features(phi, prob.y, r_next.cwiseInverse(), config.lambda1);
    double next = convex_objective(phi, prob.y, prob.d, r_next, w_next, config);
    if (!(next <= objective)) {
      next = objective;
      r_next = r;
      w_next = w;
    }
    const double decrease = objective - next;
    r = std::move(r_next);
    w = std::move(w_next);
    objective = next;
    out.objective_trace.push_back(objective);
    if (decrease <= config.tol * std::max(1.0, std::abs(objective))) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = to_coefficients(prob.fm, w);
  out.q = WeightVector(r.cwiseInverse());
  out.r = r;
  out.discrepancies = prob.d;
  out.radius = config.radius;
  return out;
}

FitResult fit_dbf_convex(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config) {
  SolverConfig c = config;
  return fit_dbf_convex(data, kernel, estimate_discrepancies(data, kernel, c), c);
}

FitResult fit_dbf_dual(const RegressionDataset& data, const KernelSpec& kernel, const InstantDiscrepancies& d,
                       const SolverConfig& config) {
  config.validate();
  require(config.lambda1 > 0.0, ErrorKind::kInvalidArgument, "dual DBF needs lambda1 > 0");
  require(d.d.size() == static_cast<Eigen::Index>(data.rows()), ErrorKind::kLengthMismatch,
          "discrepancies must match the dataset");
  const GramMatrix k = gram(kernel, data.features);
  const Vector& y = data.targets;
  const Vector v = config.prior_for(data.rows()).values();
  require((v.array() > 0.0).all(), ErrorKind::kInvalidArgument, "dual DBF needs a strictly positive prior");
  const double lambda1 = config.lambda1;

  // The inner maximum equals lambda1 times the primal ridge minimum, so it is
  // divided by lambda1 to keep the outer objective on the primal scale.
  auto inner = [&](const Vector& r) { return weighted_ridge_dual(k, WeightVector(r.cwiseInverse()), lambda1, y); };
  auto outer = [&](const Vector& r, const DualRidge& dr) {
    return dr.objective / lambda1 + (d.d.array() / r.array()).sum() + r_penalty(r, v, config.lambda2, config.norm_p);
  };

  Vector r = v.cwiseInverse().cwiseMax(1.0);
  DualRidge dr = inner(r);
  double objective = outer(r, dr);
  FitResult out;
  out.objective_trace.push_back(objective);
  for (int it = 1; it <= config.max_iters; ++it) {
    out.iterations = it;
    // d/dr_t of the scaled inner value is -alpha_t^2 = -(loss_t / r_t^2).
    const Vector residual = (r.array() * dr.alpha.array()).matrix();
    const Vector cost = residual.array().square().matrix() + d.d;
    Vector r_next = r_step(cost, r, v, config);
    DualRidge dr_next = inner(r_next);
    double next = outer(r_next, dr_next);
    if (!(next <= objective)) {
      next = objective;
      r_next = r;
      dr_next = dr;
    }
    const double decrease = objective - next;
    r = std::move(r_next);
    dr = std::move(dr_next);
    objective = next;
    out.objective_trace.push_back(objective);
    if (decrease <= config.tol * std::max(1.0, std::abs(objective))) {
      out.converged = true;
      break;
    }
  }
  out.coefficients = DualCoefficients{dr.alpha, dr.scale};
  out.q = WeightVector(r.cwiseInverse());
  out.r = r;
  out.discrepancies = d.d;
  out.radius = config.radius;
  return out;
}

FitResult fit_dbf_dual(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config) {
  return fit_dbf_dual(data, kernel, estimate_discrepancies(data, kernel, config), config);
}

Vector project_to_simplex(const Vector& x) {
  const Eigen::Index n = x.size();
  std::vector<double> sorted(x.data(), x.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) theta = candidate;
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

FitResult fit_two_stage(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config) {
  config.validate();
  const FeatureMatrix fm = sample_features(kernel, data.features);
  const Matrix& phi = fm.phi;
  const Vector& y = data.targets;
  const std::size_t n = data.rows();
  const TargetProxy proxy = target_proxy(n, std::min(config.s, n));
  const BallConstraint ball(config.radius);

  // G(q) = sup_w sum_t (p_t - q_t) loss_t(w), with the attaining w.
  auto evaluate = [&](const Vector& q) {
    const Vector delta = proxy.p.values() - q;
    Matrix a = phi.transpose() * delta.asDiagonal() * phi;
    a = 0.5 * (a + a.transpose());
    const Vector b = -2.0 * phi.transpose() * (delta.array() * y.array()).matrix();
    const double c = (delta.array() * y.array().square()).sum();
    return max_quadratic_on_ball(QuadraticForm(std::move(a), b, c), ball);
  };

  Vector q = config.stage_one_init == StageOneInit::kProxy ? proxy.p.values() : config.prior_for(n).values();
  TrsSolution sol = evaluate(q);
  Vector best_q = q;
  double best_value = sol.value;

  FitResult out;
  out.objective_trace.push_back(sol.value);
  const Vector first_losses = squared_residuals(phi, y, sol.argmax);
  const double a_scale = 1.0 / std::max(first_losses.maxCoeff(), 1e-300);
  constexpr double kStepOffset = 10.0;
  for (int k = 0; k < config.stage_one_iters; ++k) {
    out.iterations = k + 1;
    // Subgradient of G at q: component t is -loss_t(w*).
    const Vector subgrad = -squared_residuals(phi, y, sol.argmax);
    const double step = a_scale / (static_cast<double>(k) + kStepOffset);
    const Vector next = project_to_simplex(q - step * subgrad);
    const double change = (next - q).cwiseAbs().sum();
    q = next;
    sol = evaluate(q);
    out.objective_trace.push_back(sol.value);
    if (sol.value < best_value) {
      best_value = sol.value;
      best_q = q;
    }
    if (change < config.tol) {
      out.converged = true;
      break;
    }
  }

  const Vector w = weighted_ridge_features(phi, y, best_q, config.lambda2);
  out.coefficients = to_coefficients(fm, w);
  out.q = WeightVector(best_q);
  out.radius = config.radius;
  return out;
}

double predict(const FitResult& fit, const KernelSpec& kernel, const Matrix& training_features, const Vector& x) {
  if (const auto* primal = std::get_if<PrimalCoefficients>(&fit.coefficients)) {
    require(primal->w.size() == x.size(), ErrorKind::kDimensionMismatch, "feature row has the wrong dimension");
    return primal->w.dot(x);
  }
  const auto& dual = std::get<DualCoefficients>(fit.coefficients);
  require(dual.alpha.size() == training_features.rows(), ErrorKind::kDimensionMismatch,
          "training features do not match the dual coefficients");
  require(training_features.cols() == x.size(), ErrorKind::kDimensionMismatch, "feature row has the wrong dimension");
  double total = 0.0;
  for (Eigen::Index t = 0; t < training_features.rows(); ++t) {
    if (dual.alpha[t] != 0.0) total += dual.alpha[t] * kernel(training_features.row(t).transpose(), x);
  }
  return dual.scale * total;
}

Vector predict_rows(const FitResult& fit, const KernelSpec& kernel, const Matrix& training_features,
                    const Matrix& rows) {
  Vector out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) out[i] = predict(fit, kernel, training_features, rows.row(i).transpose());
  return out;
}

}  // namespace dbf
