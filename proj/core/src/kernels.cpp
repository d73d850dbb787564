#include "dbf/kernels.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace dbf {

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  require(degree >= 1, ErrorKind::kInvalidArgument, "polynomial degree must be >= 1");
  KernelSpec k;
  k.kind = KernelKind::kPolynomial;
  k.degree = degree;
  k.offset = offset;
  return k;
}

KernelSpec KernelSpec::rbf(double gamma) {
  require(gamma > 0.0 && std::isfinite(gamma), ErrorKind::kInvalidArgument, "rbf gamma must be positive");
  KernelSpec k;
  k.kind = KernelKind::kRbf;
  k.gamma = gamma;
  return k;
}

KernelSpec KernelSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) fail(ErrorKind::kInvalidArgument, "empty kernel spec");
  try {
    if (parts[0] == "linear" && parts.size() == 1) return linear();
    if (parts[0] == "poly" && parts.size() == 3) return polynomial(std::stoi(parts[1]), std::stod(parts[2]));
    if (parts[0] == "rbf" && parts.size() == 2) return rbf(std::stod(parts[1]));
  } catch (const std::logic_error&) {
    // fall through to the generic message
  }
  fail(ErrorKind::kInvalidArgument, "unrecognized kernel spec '" + text +
                                        "' (expected linear, poly:<degree>:<offset> or rbf:<gamma>)");
}

std::string KernelSpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case KernelKind::kLinear: out << "linear"; break;
    case KernelKind::kPolynomial: out << "poly:" << degree << ":" << offset; break;
    case KernelKind::kRbf: out << "rbf:" << gamma; break;
  }
  return out.str();
}

double KernelSpec::operator()(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z) const {
  switch (kind) {
    case KernelKind::kLinear: return x.dot(z);
    case KernelKind::kPolynomial: return std::pow(x.dot(z) + offset, degree);
    case KernelKind::kRbf: return std::exp(-gamma * (x - z).squaredNorm());
  }
  return 0.0;
}

Matrix cross_gram(const KernelSpec& kernel, const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), ErrorKind::kDimensionMismatch, "kernel inputs differ in dimension");
  if (kernel.kind == KernelKind::kLinear) return a * b.transpose();
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose());
    }
  }
  return out;
}

GramMatrix gram(const KernelSpec& kernel, const Matrix& features) {
  require(features.rows() > 0, ErrorKind::kInvalidArgument, "gram needs at least one row");
  require(all_finite(features), ErrorKind::kInvalidArgument, "gram inputs must be finite");
  const Eigen::Index n = features.rows();
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel(features.row(i).transpose(), features.row(j).transpose());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return {std::move(g)};
}

FeatureMatrix feature_factorize(const GramMatrix& g, double tol) {
  require(tol > 0.0, ErrorKind::kInvalidArgument, "factorization tolerance must be positive");
  const Matrix& k = g.entries;
  require(k.rows() == k.cols() && k.rows() > 0, ErrorKind::kDimensionMismatch, "Gram matrix must be square");
  const Matrix sym = 0.5 * (k + k.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) fail(ErrorKind::kNumericalFailure, "Gram eigendecomposition failed");

  const Vector& values = eig.eigenvalues();  // ascending
  const double top = values.maxCoeff();
  const double scale = std::max(top, 0.0);
  if (values.minCoeff() < -1e-6 * scale || (top <= 0.0 && values.minCoeff() < 0.0)) {
    fail(ErrorKind::kNotPsd, "Gram matrix has a significantly negative eigenvalue");
  }

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = values.size() - 1; i >= 0; --i) {
    if (values[i] > tol * scale && values[i] > 0.0) kept.push_back(i);
  }
  FeatureMatrix out;
  const Eigen::Index n = k.rows();
  const auto r = static_cast<Eigen::Index>(kept.size());
  // An all-zero Gram keeps one zero column so downstream quadratics stay 1-D.
  out.phi = Matrix::Zero(n, std::max<Eigen::Index>(r, 1));
  out.coefficient_map = Matrix::Zero(n, std::max<Eigen::Index>(r, 1));
  for (Eigen::Index c = 0; c < r; ++c) {
    const Eigen::Index i = kept[static_cast<std::size_t>(c)];
    const double root = std::sqrt(values[i]);
    out.phi.col(c) = eig.eigenvectors().col(i) * root;
    out.coefficient_map.col(c) = eig.eigenvectors().col(i) / root;
  }
  out.input_space = false;
  return out;
}

FeatureMatrix sample_features(const KernelSpec& kernel, const Matrix& features, double tol) {
  if (kernel.kind != KernelKind::kLinear) return feature_factorize(gram(kernel, features), tol);
  require(features.rows() > 0, ErrorKind::kInvalidArgument, "need at least one row");
  Eigen::JacobiSVD<Matrix> svd(features, Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();  // descending
  const double top = sv.size() > 0 ? sv[0] * sv[0] : 0.0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] * sv[r] > tol * top && sv[r] > 0.0) ++r;
  FeatureMatrix out;
  if (r == 0) {
    out.coefficient_map = Matrix::Zero(features.cols(), 1);
  } else {
    out.coefficient_map = svd.matrixV().leftCols(r);
  }
  out.phi = features * out.coefficient_map;
  out.input_space = true;
  return out;
}

double kernel_radius(const KernelSpec& kernel, const Matrix& features) {
  require(features.rows() > 0, ErrorKind::kInvalidArgument, "kernel_radius needs at least one row");
  double best = 0.0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const Vector x = features.row(i).transpose();
    best = std::max(best, kernel(x, x));
  }
  return std::sqrt(best);
}

}  // namespace dbf
