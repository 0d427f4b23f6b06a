#pragma once

#include <vector>

#include "coreprune/point_set.hpp"

namespace coreprune {

/// v = sum_k coefficients[k] * P.row(indices[k]), coefficients on the simplex.
struct ConvexDecomposition {
  std::vector<Index> indices;
  std::vector<double> coefficients;
};

inline constexpr double kLpFeasibilityTol = 1e-8;

/// Dense x >= 0 with sum x = 1 and sum x_i p_i = v. Throws Infeasible when v is
/// not in conv(P) up to kLpFeasibilityTol * max(1, scale).
Vector lp_decompose(const Eigen::Ref<const Vector>& v, const PointSet& points);

/// Reduces the support of a feasible x to at most dim + 1 points by repeated
/// null-space elimination. When `residual_trace` is non-null it receives
/// ||Ax - b||_inf before the first and after every elimination step.
ConvexDecomposition sparsify(const PointSet& points, const Eigen::Ref<const Vector>& x,
                             const Eigen::Ref<const Vector>& v,
                             std::vector<double>* residual_trace = nullptr);

ConvexDecomposition cara(const Eigen::Ref<const Vector>& v, const PointSet& points);

Vector reconstruct(const ConvexDecomposition& decomposition, const PointSet& points);

}  // namespace coreprune
