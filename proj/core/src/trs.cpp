#include "dbf/trs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dbf {

QuadraticForm::QuadraticForm(Matrix a, Vector bv, double cv) : A(std::move(a)), b(std::move(bv)), c(cv) {
  require(A.rows() == A.cols() && A.rows() == b.size(), ErrorKind::kDimensionMismatch,
          "quadratic form dimensions disagree");
  require(b.size() >= 1, ErrorKind::kInvalidArgument, "quadratic form needs dimension >= 1");
  require(all_finite(A) && all_finite(b) && std::isfinite(c), ErrorKind::kInvalidArgument,
          "quadratic form entries must be finite");
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  require((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale, ErrorKind::kInvalidArgument,
          "quadratic form matrix must be symmetric");
}

BallConstraint::BallConstraint(double r) : radius(r) {
  require(r > 0.0 && std::isfinite(r), ErrorKind::kInvalidArgument, "ball radius must be positive");
}

namespace {

constexpr double kRootTol = 1e-12;
constexpr double kHardCaseTol = 1e-10;
constexpr int kMaxRootIterations = 500;

struct EigenSolution {
  Vector z;  // maximizer in eigen coordinates
  double multiplier = 0.0;
  bool hard_case = false;
};

// Maximizes sum_i lambda_i z_i^2 + beta_i z_i over ||z|| <= radius.
EigenSolution solve_in_eigenbasis(const Vector& lambda, const Vector& beta, double radius) {
  const Eigen::Index m = lambda.size();
  const double lmax = lambda.maxCoeff();
  const double spread = 1.0 + lambda.cwiseAbs().maxCoeff();
  const double beta_norm = beta.norm();
  EigenSolution out;
  out.z = Vector::Zero(m);

  // Interior stationary point for a negative definite form.
  if (lmax < 0.0) {
    Vector z = (-beta.array() / (2.0 * lambda.array())).matrix();
    if (z.norm() <= radius) {
      out.z = z;
      return out;
    }
  }

  const double degenerate_gap = kRootTol * spread;
  std::vector<bool> top(static_cast<std::size_t>(m), false);
  double top_beta_sq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lambda[i] >= lmax - degenerate_gap) {
      top[static_cast<std::size_t>(i)] = true;
      top_beta_sq += beta[i] * beta[i];
    }
  }
  const bool hard = std::sqrt(top_beta_sq) <= kHardCaseTol * (1.0 + beta_norm);

  auto norm_at = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (hard && top[static_cast<std::size_t>(i)]) continue;
      const double d = 2.0 * (mu - lambda[i]);
      s += beta[i] * beta[i] / (d * d);
    }
    return std::sqrt(s);
  };
  auto z_at = [&](double mu) {
    Vector z = Vector::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (hard && top[static_cast<std::size_t>(i)]) continue;
      z[i] = beta[i] / (2.0 * (mu - lambda[i]));
    }
    return z;
  };

  if (hard && lmax >= 0.0) {
    // Solution at mu = lambda_max padded along the top eigenspace.
    double rest_sq = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (top[static_cast<std::size_t>(i)]) continue;
      const double d = 2.0 * (lmax - lambda[i]);
      rest_sq += beta[i] * beta[i] / (d * d);
    }
    if (rest_sq <= radius * radius) {
      Vector z = Vector::Zero(m);
      Eigen::Index first_top = -1;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (top[static_cast<std::size_t>(i)]) {
          if (first_top < 0 || lambda[i] > lambda[first_top]) first_top = i;
        } else {
          z[i] = beta[i] / (2.0 * (lmax - lambda[i]));
        }
      }
      z[first_top] = std::sqrt(std::max(0.0, radius * radius - rest_sq));
      out.z = z;
      out.multiplier = lmax;
      out.hard_case = true;
      return out;
    }
  }

  // Boundary solution: find mu > max(lmax, 0) with ||z(mu)|| = radius.
  double lo = std::max(lmax, 0.0);
  double hi = lo + beta_norm / (2.0 * radius);
  if (!(hi > lo)) hi = lo + std::numeric_limits<double>::min();
  while (norm_at(hi) > radius) {
    hi = lo + 2.0 * (hi - lo) + 1e-300;
    if (!std::isfinite(hi)) fail(ErrorKind::kNumericalFailure, "secular equation could not be bracketed");
  }
  // phi(mu) = 1/||z(mu)|| - 1/radius is increasing; root lies in (lo, hi].
  double mu = hi;
  for (int it = 0; it < kMaxRootIterations; ++it) {
    const double nrm = norm_at(mu);
    const double phi = 1.0 / nrm - 1.0 / radius;
    if (phi >= 0.0) {
      hi = mu;
    } else {
      lo = mu;
    }
    if (hi - lo <= kRootTol * std::max(1.0, std::abs(mu)) || phi == 0.0) break;
    double dnorm_sq = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (hard && top[static_cast<std::size_t>(i)]) continue;
      const double d = mu - lambda[i];
      dnorm_sq += -beta[i] * beta[i] / (2.0 * d * d * d);
    }
    const double dphi = -0.5 * dnorm_sq / (nrm * nrm * nrm);
    double next = mu - phi / dphi;
    if (!(dphi > 0.0) || !(next > lo) || !(next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    mu = next;
  }
  // Evaluate on the feasible side of the bracket.
  mu = hi;
  out.z = z_at(mu);
  const double nz = out.z.norm();
  if (nz > radius) {
    out.z *= radius / nz;
  } else {
    // Near the hard case ||z(mu)|| is steep in mu; close the remaining gap
    // along the top eigenvector, where the root error concentrates.
    Eigen::Index k = 0;
    lambda.maxCoeff(&k);
    const double rest_sq = nz * nz - out.z[k] * out.z[k];
    const double sign = out.z[k] < 0.0 || (out.z[k] == 0.0 && beta[k] < 0.0) ? -1.0 : 1.0;
    out.z[k] = sign * std::sqrt(std::max(0.0, radius * radius - rest_sq));
  }
  out.multiplier = mu;
  return out;
}

double evaluate_in_eigenbasis(const Vector& lambda, const Vector& beta, double c, const Vector& z) {
  return (lambda.array() * z.array().square()).sum() + beta.dot(z) + c;
}

TrsSolution solve_scalar(double a, double b, double c, double radius) {
  TrsSolution best;
  best.argmax = Vector::Constant(1, radius);
  best.value = a * radius * radius + b * radius + c;
  const double left = a * radius * radius - b * radius + c;
  if (left > best.value) {
    best.value = left;
    best.argmax[0] = -radius;
  }
  if (a < 0.0) {
    const double w = -b / (2.0 * a);
    const double v = a * w * w + b * w + c;
    if (std::abs(w) <= radius && v >= best.value) {
      best.value = v;
      best.argmax[0] = w;
    }
  }
  const double w = best.argmax[0];
  if (std::abs(w) >= radius) {
    best.multiplier = std::max(0.0, (2.0 * a * w + b) / (2.0 * w));
  }
  return best;
}

}  // namespace

TrsSolution max_quadratic_on_ball(const QuadraticForm& qf, const BallConstraint& ball) {
  if (qf.dim() == 1) return solve_scalar(qf.A(0, 0), qf.b[0], qf.c, ball.radius);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (qf.A + qf.A.transpose()));
  if (eig.info() != Eigen::Success) fail(ErrorKind::kNumericalFailure, "eigendecomposition failed");
  const Vector beta = eig.eigenvectors().transpose() * qf.b;
  const EigenSolution s = solve_in_eigenbasis(eig.eigenvalues(), beta, ball.radius);
  TrsSolution out;
  out.argmax = eig.eigenvectors() * s.z;
  out.value = evaluate_in_eigenbasis(eig.eigenvalues(), beta, qf.c, s.z);
  out.multiplier = s.multiplier;
  out.hard_case = s.hard_case;
  return out;
}

double sup_abs_quadratic_on_ball(const QuadraticForm& qf, const BallConstraint& ball) {
  double upper = 0.0;
  double lower = 0.0;
  if (qf.dim() == 1) {
    upper = solve_scalar(qf.A(0, 0), qf.b[0], qf.c, ball.radius).value;
    lower = solve_scalar(-qf.A(0, 0), -qf.b[0], -qf.c, ball.radius).value;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (qf.A + qf.A.transpose()));
    if (eig.info() != Eigen::Success) fail(ErrorKind::kNumericalFailure, "eigendecomposition failed");
    const Vector& lambda = eig.eigenvalues();
    const Vector beta = eig.eigenvectors().transpose() * qf.b;
    const EigenSolution plus = solve_in_eigenbasis(lambda, beta, ball.radius);
    upper = evaluate_in_eigenbasis(lambda, beta, qf.c, plus.z);
    const Vector neg_lambda = -lambda;
    const Vector neg_beta = -beta;
    const EigenSolution minus = solve_in_eigenbasis(neg_lambda, neg_beta, ball.radius);
    lower = evaluate_in_eigenbasis(neg_lambda, neg_beta, -qf.c, minus.z);
  }
  return std::max({upper, lower, std::abs(qf.c)});
}

KktReport check_trs_certificate(const QuadraticForm& qf, const BallConstraint& ball,
                                const TrsSolution& solution, double tol) {
  KktReport r;
  const Vector& w = solution.argmax;
  if (w.size() != qf.dim()) return r;
  const double nw = w.norm();
  const double radius = ball.radius;
  r.feasibility_violation = std::max(0.0, nw - radius);

  const Vector grad = 2.0 * qf.A * w + qf.b;  // gradient of the maximized form
  double mu = 0.0;
  if (nw >= radius * (1.0 - 1e-8) && nw > 0.0) {
    mu = std::max(0.0, w.dot(grad) / (2.0 * nw * nw));
  }
  r.multiplier = mu;
  r.stationarity_residual = (grad - 2.0 * mu * w).norm();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(qf.A, Eigen::EigenvaluesOnly);
  r.psd_violation = std::max(0.0, eig.eigenvalues().maxCoeff() - mu);
  r.complementarity = mu * std::max(0.0, radius - nw);
  r.value_error = std::abs(qf(w) - solution.value);

  const double scale = 1.0 + qf.b.norm();
  const double a_scale = 1.0 + qf.A.norm();
  r.ok = r.stationarity_residual <= tol * scale &&
         r.psd_violation <= tol * a_scale &&
         r.feasibility_violation <= tol * radius &&
         r.complementarity <= tol * scale * radius &&
         r.value_error <= tol * (1.0 + std::abs(solution.value));
  return r;
}

}  // namespace dbf
