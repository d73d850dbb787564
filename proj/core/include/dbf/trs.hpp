#pragma once

#include "dbf/core.hpp"

namespace dbf {

/// q(w) = w^T A w + b^T w + c with A symmetric.
struct QuadraticForm {
  Matrix A;
  Vector b;
  double c = 0.0;

  QuadraticForm() = default;
  QuadraticForm(Matrix a, Vector b, double c);

  Eigen::Index dim() const { return b.size(); }
  double operator()(const Vector& w) const { return w.dot(A * w) + b.dot(w) + c; }
  QuadraticForm negated() const { return QuadraticForm(-A, -b, -c); }
};

struct BallConstraint {
  double radius = 1.0;

  explicit BallConstraint(double r);
};

struct TrsSolution {
  double value = 0.0;
  Vector argmax;
  // Lagrange multiplier of the ball constraint in 2(mu I - A) w = b.
  double multiplier = 0.0;
  bool hard_case = false;
};

/// Global maximum of qf over {||w|| <= radius}. Eigendecomposes A and solves
/// the secular equation for the boundary multiplier by safeguarded Newton.
TrsSolution max_quadratic_on_ball(const QuadraticForm& qf, const BallConstraint& ball);

/// max(sup q, sup -q) over the ball, sharing one eigendecomposition.
double sup_abs_quadratic_on_ball(const QuadraticForm& qf, const BallConstraint& ball);

struct KktReport {
  bool ok = false;
  double multiplier = 0.0;
  double stationarity_residual = 0.0;
  double psd_violation = 0.0;    // max(0, lambda_max(A) - mu)
  double feasibility_violation = 0.0;
  double complementarity = 0.0;  // mu * (radius - ||w||)
  double value_error = 0.0;
};

/// Recomputes the optimality certificate of a returned maximizer from scratch.
KktReport check_trs_certificate(const QuadraticForm& qf, const BallConstraint& ball,
                                const TrsSolution& solution, double tol = 1e-8);

}  // namespace dbf
