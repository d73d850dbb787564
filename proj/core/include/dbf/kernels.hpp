#pragma once

#include <string>

#include "dbf/core.hpp"

namespace dbf {

enum class KernelKind { kLinear, kPolynomial, kRbf };

struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  int degree = 2;       // polynomial only
  double offset = 1.0;  // polynomial only
  double gamma = 1.0;   // rbf only

  static KernelSpec linear() { return {}; }
  static KernelSpec polynomial(int degree, double offset);
  static KernelSpec rbf(double gamma);

  /// Parses "linear", "poly:<degree>:<offset>" or "rbf:<gamma>".
  static KernelSpec parse(const std::string& text);
  std::string to_string() const;

  double operator()(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) const;
};

struct GramMatrix {
  Matrix entries;
};

/// Finite-dimensional stand-in for the feature map over a sample:
/// phi * phi^T reproduces the Gram matrix. `coefficient_map` turns a weight
/// vector in feature coordinates into predictor coefficients: input-space
/// weights when `input_space` is set (linear kernel), otherwise dual
/// coefficients over the sample rows.
struct FeatureMatrix {
  Matrix phi;
  Matrix coefficient_map;
  bool input_space = false;

  Eigen::Index rank() const { return phi.cols(); }
};

GramMatrix gram(const KernelSpec& kernel, const Matrix& features);

/// k(a_i, b_j) for every pair of rows.
Matrix cross_gram(const KernelSpec& kernel, const Matrix& a, const Matrix& b);

/// Eigendecomposition-based factorization; eigenvalues below tol * max are
/// dropped. Throws NotPSD when the spectrum dips below -1e-6 * max.
FeatureMatrix feature_factorize(const GramMatrix& g, double tol = 1e-10);

/// Feature matrix for a sample. Linear kernels factor the design matrix by
/// SVD (same Gram, no n x n eigenproblem); other kernels go through
/// feature_factorize(gram(...)).
FeatureMatrix sample_features(const KernelSpec& kernel, const Matrix& features, double tol = 1e-10);

/// max_t sqrt(k(x_t, x_t)) over the sample.
double kernel_radius(const KernelSpec& kernel, const Matrix& features);

}  // namespace dbf
