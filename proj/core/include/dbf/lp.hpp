#pragma once

#include "dbf/core.hpp"

namespace dbf {

/// minimize c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= lower.
/// Empty matrices mean "no constraints of that kind"; an empty `lower`
/// means all-zero lower bounds.
struct LinearProgram {
  Vector c;
  Matrix A_eq;
  Vector b_eq;
  Matrix A_ub;
  Vector b_ub;
  Vector lower;

  Eigen::Index num_vars() const { return c.size(); }
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  int iterations = 0;
};

/// Dense two-phase primal simplex with Bland's rule.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace dbf
