#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "dbf/core.hpp"
#include "dbf/discrepancy.hpp"
#include "dbf/kernels.hpp"

namespace dbf {

enum class StageOneInit { kPrior, kProxy };

struct SolverConfig {
  double lambda1 = 1e-3;  // ||w||^2 weight
  double lambda2 = 1.0;   // ||q - v|| weight; ridge parameter of the two-stage second step
  double radius = 1.0;    // hypothesis-ball radius used inside discrepancy sups
  std::optional<WeightVector> prior;  // v; uniform when unset
  double norm_p = 1.0;
  int max_iters = 500;
  double tol = 1e-8;
  std::size_t s = 20;
  std::size_t window = 0;
  // q-steps on at most this many points go through the simplex LP solver;
  // larger ones use the equivalent closed-form vertex.
  std::size_t lp_max_size = 64;
  StageOneInit stage_one_init = StageOneInit::kPrior;
  int stage_one_iters = 300;

  void validate() const;
  WeightVector prior_for(std::size_t n) const;
};

struct PrimalCoefficients {
  Vector w;  // input-space weights
};

struct DualCoefficients {
  Vector alpha;  // one per training row
  double scale = 1.0;
};

using Coefficients = std::variant<PrimalCoefficients, DualCoefficients>;

struct FitResult {
  Coefficients coefficients;
  WeightVector q;
  std::optional<Vector> r;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  Vector discrepancies;
  double radius = 0.0;
};

/// argmin_w sum_t q_t (w.x_t - y_t)^2 + lambda1 ||w||^2 via the normal equations.
Vector weighted_ridge_primal(const RegressionDataset& data, const WeightVector& q, double lambda1);

/// Same problem on an explicit feature matrix with arbitrary non-negative weights.
Vector weighted_ridge_features(const Matrix& phi, const Vector& y, const Vector& weights, double lambda1);

struct DualRidge {
  Vector alpha;
  double scale = 1.0;      // predictions are scale * K alpha
  double objective = 0.0;  // -lambda1 sum alpha^2/q - alpha^T K alpha + 2 lambda1 alpha^T y
};

/// Closed-form maximizer alpha = lambda1 (lambda1 diag(1/q) + K)^{-1} y.
DualRidge weighted_ridge_dual(const GramMatrix& g, const WeightVector& q, double lambda1, const Vector& y);

/// min over the probability simplex of sum_t q_t (losses_t + d_t) + lambda2 ||q - v||_1.
WeightVector q_step(const Vector& losses, const InstantDiscrepancies& d, const SolverConfig& config);
WeightVector q_step_lp(const Vector& losses, const InstantDiscrepancies& d, const SolverConfig& config);
WeightVector q_step_closed_form(const Vector& losses, const InstantDiscrepancies& d, const SolverConfig& config);

double alternating_objective(const Matrix& phi, const Vector& y, const Vector& d, const WeightVector& q,
                             const Vector& w, const SolverConfig& config);

/// sum_t (loss_t + d_t)/r_t + lambda1 ||w||^2 + lambda2 sum_t v_t^p |r_t - 1/v_t|^p
double convex_objective(const Matrix& phi, const Vector& y, const Vector& d, const Vector& r, const Vector& w,
                        const SolverConfig& config);

FitResult fit_dbf_alternating(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config);
FitResult fit_dbf_alternating(const RegressionDataset& data, const KernelSpec& kernel,
                              const InstantDiscrepancies& d, const SolverConfig& config);

FitResult fit_dbf_convex(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config);
FitResult fit_dbf_convex(const RegressionDataset& data, const KernelSpec& kernel, const InstantDiscrepancies& d,
                         const SolverConfig& config);

FitResult fit_dbf_dual(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config);
FitResult fit_dbf_dual(const RegressionDataset& data, const KernelSpec& kernel, const InstantDiscrepancies& d,
                       const SolverConfig& config);

FitResult fit_two_stage(const RegressionDataset& data, const KernelSpec& kernel, const SolverConfig& config);

/// Euclidean projection onto {q >= 0, sum q = 1}.
Vector project_to_simplex(const Vector& x);

double predict(const FitResult& fit, const KernelSpec& kernel, const Matrix& training_features,
               const Vector& x);
Vector predict_rows(const FitResult& fit, const KernelSpec& kernel, const Matrix& training_features,
                    const Matrix& rows);

}  // namespace dbf
