#include "coreprune/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "coreprune/error.hpp"

namespace coreprune::lp {

Phase1Result find_feasible(const Matrix& A, const Vector& b, double tol) {
  const Index m = A.rows();
  const Index n = A.cols();
  if (b.size() != m) throw Error(ErrorKind::DimensionMismatch, "rhs length != constraint rows");

  // Columns: n structural, m artificial, RHS.
  const Index rhs = n + m;
  Matrix T = Matrix::Zero(m, n + m + 1);
  T.leftCols(n) = A;
  T.col(rhs) = b;
  for (Index i = 0; i < m; ++i) {
    if (T(i, rhs) < 0.0) T.row(i) *= -1.0;
    T(i, n + i) = 1.0;
  }
  std::vector<Index> basis(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  // Reduced costs of the artificial-sum objective.
  Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(n + m + 1);
  cost.head(n) = -T.topLeftCorner(m, n).colwise().sum();
  cost(rhs) = -T.col(rhs).sum();

  const double mag = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double rc_tol = 1e-11 * mag;
  const double pivot_tol = 1e-11 * mag;
  const int max_pivots = static_cast<int>(50 * (n + m) + 1000);

  Phase1Result result;
  for (; result.pivots < max_pivots; ++result.pivots) {
    // Bland: lowest-index improving column.
    Index enter = -1;
    for (Index j = 0; j < n + m; ++j) {
      if (cost(j) < -rc_tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    Index leave = -1;
    double best = 0.0;
    for (Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= pivot_tol) continue;
      const double ratio = T(i, rhs) / a;
      if (leave < 0 || ratio < best - 1e-12 * std::max(1.0, std::abs(best)) ||
          (std::abs(ratio - best) <= 1e-12 * std::max(1.0, std::abs(best)) &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) {
      // Cannot happen for a phase-1 problem bounded below; treat the column as spent.
      cost(enter) = 0.0;
      continue;
    }

    T.row(leave) /= T(leave, enter);
    for (Index i = 0; i < m; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    cost -= cost(enter) * T.row(leave);
    basis[static_cast<std::size_t>(leave)] = enter;
  }

  result.x = Vector::Zero(n);
  std::vector<Index> structural;
  for (Index i = 0; i < m; ++i) {
    const Index var = basis[static_cast<std::size_t>(i)];
    if (var < n) {
      result.x(var) = std::max(0.0, T(i, rhs));
      structural.push_back(var);
    }
  }

  // Re-solve the basic system against the original data to shed pivoting error.
  if (!structural.empty()) {
    Matrix AB(m, static_cast<Index>(structural.size()));
    for (std::size_t k = 0; k < structural.size(); ++k) AB.col(static_cast<Index>(k)) = A.col(structural[k]);
    const Vector xB = AB.colPivHouseholderQr().solve(b);
    if (xB.allFinite() && xB.minCoeff() >= -tol) {
      Vector refined = Vector::Zero(n);
      for (std::size_t k = 0; k < structural.size(); ++k)
        refined(structural[k]) = std::max(0.0, xB(static_cast<Index>(k)));
      if ((A * refined - b).cwiseAbs().maxCoeff() <= (A * result.x - b).cwiseAbs().maxCoeff())
        result.x = refined;
    }
  }

  result.infeasibility = -cost(rhs);
  const double residual = (A * result.x - b).cwiseAbs().maxCoeff();
  result.feasible = residual <= tol;
  return result;
}

}  // namespace coreprune::lp
