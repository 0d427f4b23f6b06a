#include "coreprune/caratheodory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "coreprune/error.hpp"
#include "coreprune/simplex.hpp"

namespace coreprune {

namespace {

constexpr double kClamp = 1e-12;

// Columns are points with a trailing 1.
Matrix lifted_columns(const PointSet& points) {
  Matrix A(points.dim() + 1, points.size());
  A.topRows(points.dim()) = points.data().transpose();
  A.bottomRows(1).setOnes();
  return A;
}

Vector lifted_target(const Eigen::Ref<const Vector>& v) {
  Vector b(v.size() + 1);
  b.head(v.size()) = v;
  b(v.size()) = 1.0;
  return b;
}

double residual(const Matrix& A, const Vector& x, const Vector& b) {
  return (A * x - b).cwiseAbs().maxCoeff();
}

}  // namespace

Vector lp_decompose(const Eigen::Ref<const Vector>& v, const PointSet& points) {
  if (v.size() != points.dim())
    throw Error(ErrorKind::DimensionMismatch, "target has " + std::to_string(v.size()) +
                                                  " coordinates, points have " + std::to_string(points.dim()));
  const Matrix A = lifted_columns(points);
  const Vector b = lifted_target(v);
  const double tol = kLpFeasibilityTol * std::max(1.0, points.scale());
  const lp::Phase1Result lp = lp::find_feasible(A, b, tol);
  if (!lp.feasible)
    throw Error(ErrorKind::Infeasible, "target outside the convex hull (residual " +
                                           std::to_string(residual(A, lp.x, b)) + ")");
  return lp.x;
}

ConvexDecomposition sparsify(const PointSet& points, const Eigen::Ref<const Vector>& x_in,
                             const Eigen::Ref<const Vector>& v, std::vector<double>* residual_trace) {
  if (x_in.size() != points.size() || v.size() != points.dim())
    throw Error(ErrorKind::DimensionMismatch, "coefficient or target size mismatch");
  const Matrix A = lifted_columns(points);
  const Vector b = lifted_target(v);
  const Index D = points.dim() + 1;

  Vector x = x_in;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) < 0.0 && x(i) >= -kClamp) x(i) = 0.0;
  }
  if (x.minCoeff() < 0.0) throw Error(ErrorKind::InvalidParameter, "coefficients must be nonnegative");

  std::vector<Index> support;
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) > 0.0) support.push_back(i);
  if (residual_trace) residual_trace->push_back(residual(A, x, b));

  while (static_cast<Index>(support.size()) > D) {
    Matrix sub(D, D + 1);
    for (Index k = 0; k <= D; ++k) sub.col(k) = A.col(support[static_cast<std::size_t>(k)]);
    Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
    Vector kernel = svd.matrixV().col(D);
    const double sub_mag = std::max(1.0, sub.cwiseAbs().maxCoeff());
    if (!kernel.allFinite() || (sub * kernel).cwiseAbs().maxCoeff() > 1e-10 * sub_mag)
      throw Error(ErrorKind::NumericalBreakdown, "kernel solve failed during support reduction");
    if (kernel.maxCoeff() <= 0.0) kernel = -kernel;

    double alpha = std::numeric_limits<double>::infinity();
    Index hit = -1;
    for (Index k = 0; k <= D; ++k) {
      if (kernel(k) > 1e-14) {
        const double step = x(support[static_cast<std::size_t>(k)]) / kernel(k);
        if (step < alpha) {
          alpha = step;
          hit = k;
        }
      }
    }
    if (hit < 0) throw Error(ErrorKind::NumericalBreakdown, "kernel vector has no positive entry");

    for (Index k = 0; k <= D; ++k) {
      const Index col = support[static_cast<std::size_t>(k)];
      x(col) -= alpha * kernel(k);
      if (x(col) < 0.0) x(col) = 0.0;
    }
    x(support[static_cast<std::size_t>(hit)]) = 0.0;
    std::erase_if(support, [&](Index i) { return x(i) <= 0.0; });
    if (residual_trace) residual_trace->push_back(residual(A, x, b));
  }

  // Re-solve on the final support when it tightens the reconstruction.
  if (!support.empty()) {
    Matrix AS(D, static_cast<Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) AS.col(static_cast<Index>(k)) = A.col(support[k]);
    const Vector xs = AS.colPivHouseholderQr().solve(b);
    if (xs.allFinite() && xs.minCoeff() > 0.0) {
      Vector candidate = Vector::Zero(x.size());
      for (std::size_t k = 0; k < support.size(); ++k) candidate(support[k]) = xs(static_cast<Index>(k));
      if (residual(A, candidate, b) < residual(A, x, b)) x = candidate;
    }
  }

  ConvexDecomposition out;
  double sum = 0.0;
  for (Index i : support) sum += x(i);
  if (!(sum > 0.0)) throw Error(ErrorKind::NumericalBreakdown, "coefficients vanished");
  for (Index i : support) {
    out.indices.push_back(i);
    out.coefficients.push_back(x(i) / sum);
  }
  return out;
}

ConvexDecomposition cara(const Eigen::Ref<const Vector>& v, const PointSet& points) {
  const Vector x = lp_decompose(v, points);
  return sparsify(points, x, v);
}

Vector reconstruct(const ConvexDecomposition& decomposition, const PointSet& points) {
  Vector out = Vector::Zero(points.dim());
  for (std::size_t k = 0; k < decomposition.indices.size(); ++k)
    out += decomposition.coefficients[k] * points.data().row(decomposition.indices[k]).transpose();
  return out;
}

}  // namespace coreprune
