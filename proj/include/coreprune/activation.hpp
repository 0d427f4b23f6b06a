#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coreprune/sensitivity.hpp"

namespace coreprune {

enum class Activation { Relu, Hinge, LogLoss, Softplus, Abs, Linear };

/// (L, a1, a2) of an L-Lipschitz function within a1 of relu and >= a2 on z >= 0.
struct NiceHinge {
  double lipschitz;
  double a1;
  double a2;
};

std::optional<NiceHinge> nice_hinge_params(Activation kind);

// Worst observed values of the three nice-hinge conditions on a uniform grid.
struct NiceHingeCheck {
  double max_slope = 0.0;      // finite-difference Lipschitz estimate
  double max_relu_gap = 0.0;   // max |phi(z) - relu(z)|
  double min_nonnegative = 0.0;  // min phi(z) over grid points z >= 0
  Index grid_points = 0;
  bool passed = false;
};

NiceHingeCheck check_nice_hinge(Activation kind, const NiceHinge& params, double lo = -50.0,
                                double hi = 50.0, Index grid_points = 100001);

std::string_view to_string(Activation kind);
Activation activation_from_string(std::string_view tag);

double apply(Activation kind, double z);
Vector apply(Activation kind, const Vector& z);

/// sum_i w_i phi(p_i^T x).
double layer_cost(const PointSet& points, const Eigen::Ref<const Vector>& query, Activation kind);

/// sum_k u_k phi(p_{idx_k}^T x).
double coreset_cost(const PointSet& points, const WeightedCoreset& coreset,
                    const Eigen::Ref<const Vector>& query, Activation kind);

/// C = every row with u = w.
WeightedCoreset full_coreset(const PointSet& points);

struct ErrorStats {
  double max = 0.0;
  double mean = 0.0;
  Index evaluated = 0;
  Index skipped = 0;
};

/// |1 - coreset cost / full cost| per query (rows of `queries`); queries with a
/// full cost below 1e-12 in magnitude are skipped.
ErrorStats coreset_rel_error(const PointSet& points, const WeightedCoreset& coreset,
                             const Matrix& queries, Activation kind);

/// Negative-side over positive-side absolute mass of P x; nullopt when the
/// positive side is empty (below 1e-12).
std::optional<double> complexity_ratio(const PointSet& points, const Eigen::Ref<const Vector>& x);

struct ComplexityEstimate {
  double mu = 0.0;  // lower bound on the regression complexity measure
  Index valid_queries = 0;
  Index skipped = 0;
};

/// Random standard normal queries, each refined by `refine_steps` of
/// golden-section search on the bias (last) coordinate. The last column of
/// every row must equal 1.
ComplexityEstimate complexity_estimate(const PointSet& points, Index n_random, int refine_steps,
                                       std::uint64_t seed);

}  // namespace coreprune
