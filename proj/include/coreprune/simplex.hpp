#pragma once

#include "coreprune/point_set.hpp"

namespace coreprune::lp {

struct Phase1Result {
  bool feasible = false;
  Vector x;               // length = A.cols()
  double infeasibility;   // sum of artificial variables at the optimum
  int pivots = 0;
};

/// Dense tableau Phase-1 simplex for { x >= 0 : A x = b } with Bland's rule.
/// `tol` is the acceptance threshold on the residual max-norm.
Phase1Result find_feasible(const Matrix& A, const Vector& b, double tol);

}  // namespace coreprune::lp
