#include "dbf/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace dbf {

void LinearProgram::validate() const {
  const Eigen::Index n = c.size();
  require(n >= 1, ErrorKind::kInvalidArgument, "LP needs at least one variable");
  require(A_eq.rows() == b_eq.size(), ErrorKind::kDimensionMismatch, "A_eq rows must match b_eq");
  require(A_ub.rows() == b_ub.size(), ErrorKind::kDimensionMismatch, "A_ub rows must match b_ub");
  require(A_eq.rows() == 0 || A_eq.cols() == n, ErrorKind::kDimensionMismatch, "A_eq columns must match c");
  require(A_ub.rows() == 0 || A_ub.cols() == n, ErrorKind::kDimensionMismatch, "A_ub columns must match c");
  require(lower.size() == 0 || lower.size() == n, ErrorKind::kDimensionMismatch, "lower bounds must match c");
  require(all_finite(c) && all_finite(A_eq) && all_finite(b_eq) && all_finite(A_ub) && all_finite(b_ub) &&
              all_finite(lower),
          ErrorKind::kInvalidArgument, "LP data must be finite");
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-8;
constexpr int kMaxIterations = 100000;

// Canonical-form tableau: rows 0..m-1 are constraints, row m holds reduced
// costs with -objective in the rhs column.
class Tableau {
 public:
  Tableau(Matrix t, std::vector<Eigen::Index> basis) : t_(std::move(t)), basis_(std::move(basis)) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index rhs_col() const { return t_.cols() - 1; }
  Matrix& data() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }

  void pivot(Eigen::Index r, Eigen::Index col) {
    t_.row(r) /= t_(r, col);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, col);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = col;
  }

  void set_objective(const Vector& cost) {
    const Eigen::Index m = rows();
    t_.row(m).setZero();
    t_.row(m).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(i)];
      const double cb = b < cost.size() ? cost[b] : 0.0;
      if (cb != 0.0) t_.row(m) -= cb * t_.row(i);
    }
  }

  // Runs Bland-rule simplex over columns [0, allowed). Returns status.
  LpStatus run(Eigen::Index allowed, int& iterations) {
    const Eigen::Index m = rows();
    while (iterations < kMaxIterations) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t_(m, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      Eigen::Index leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = t_(i, rhs_col()) / a;
        const double eps = 1e-12 * std::max(1.0, std::abs(best_ratio));
        bool take = leave < 0 || ratio < best_ratio - eps;
        if (!take && std::abs(ratio - best_ratio) <= eps) {
          take = basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)];
        }
        if (take) {
          best_ratio = leave < 0 ? ratio : std::min(ratio, best_ratio);
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      pivot(leave, enter);
      ++iterations;
    }
    return LpStatus::kIterationLimit;
  }

  void drop_row(Eigen::Index r) {
    const Eigen::Index last = t_.rows() - 1;
    Matrix next(t_.rows() - 1, t_.cols());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i <= last; ++i) {
      if (i != r) next.row(k++) = t_.row(i);
    }
    t_ = std::move(next);
    basis_.erase(basis_.begin() + r);
  }

 private:
  Matrix t_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  lp.validate();
  const Eigen::Index n = lp.num_vars();
  const Vector lower = lp.lower.size() == 0 ? Vector::Zero(n) : lp.lower;
  const Eigen::Index m_ub = lp.A_ub.rows();
  const Eigen::Index m_eq = lp.A_eq.rows();
  const Eigen::Index m = m_ub + m_eq;

  // Shift to y = x - lower >= 0.
  Vector rhs(m);
  if (m_ub > 0) rhs.head(m_ub) = lp.b_ub - lp.A_ub * lower;
  if (m_eq > 0) rhs.tail(m_eq) = lp.b_eq - lp.A_eq * lower;

  std::vector<Eigen::Index> needs_artificial;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i >= m_ub || rhs[i] < 0.0) needs_artificial.push_back(i);
  }
  const Eigen::Index n_art = static_cast<Eigen::Index>(needs_artificial.size());
  const Eigen::Index slack0 = n;
  const Eigen::Index art0 = n + m_ub;
  const Eigen::Index cols = n + m_ub + n_art + 1;

  Matrix t = Matrix::Zero(m + 1, cols);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m), -1);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i < m_ub) {
      t.row(i).head(n) = lp.A_ub.row(i);
      t(i, slack0 + i) = 1.0;
    } else {
      t.row(i).head(n) = lp.A_eq.row(i - m_ub);
    }
    t(i, cols - 1) = rhs[i];
    if (rhs[i] < 0.0) t.row(i) *= -1.0;
    if (i < m_ub && rhs[i] >= 0.0) basis[static_cast<std::size_t>(i)] = slack0 + i;
  }
  for (Eigen::Index k = 0; k < n_art; ++k) {
    const Eigen::Index i = needs_artificial[static_cast<std::size_t>(k)];
    t(i, art0 + k) = 1.0;
    basis[static_cast<std::size_t>(i)] = art0 + k;
  }

  Tableau tab(std::move(t), std::move(basis));
  LpResult result;
  int iterations = 0;

  if (n_art > 0) {
    Vector phase1 = Vector::Zero(cols - 1);
    phase1.segment(art0, n_art).setOnes();
    tab.set_objective(phase1);
    const LpStatus s1 = tab.run(cols - 1, iterations);
    if (s1 == LpStatus::kIterationLimit) {
      result.status = s1;
      result.iterations = iterations;
      return result;
    }
    const double infeasibility = -tab.data()(tab.rows(), tab.rhs_col());
    if (infeasibility > kFeasTol) {
      result.status = LpStatus::kInfeasible;
      result.iterations = iterations;
      return result;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (Eigen::Index i = tab.rows() - 1; i >= 0; --i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < art0) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < art0; ++j) {
        if (std::abs(tab.data()(i, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        tab.drop_row(i);
      }
    }
  }

  Vector phase2 = Vector::Zero(cols - 1);
  phase2.head(n) = lp.c;
  tab.set_objective(phase2);
  const LpStatus s2 = tab.run(art0, iterations);
  result.iterations = iterations;
  result.status = s2;
  if (s2 != LpStatus::kOptimal) return result;

  Vector y = Vector::Zero(n);
  for (Eigen::Index i = 0; i < tab.rows(); ++i) {
    const Eigen::Index b = tab.basis()[static_cast<std::size_t>(i)];
    if (b < n) y[b] = tab.data()(i, tab.rhs_col());
  }
  result.x = lower + y;
  result.objective = lp.c.dot(result.x);
  return result;
}

}  // namespace dbf
