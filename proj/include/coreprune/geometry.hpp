#pragma once

#include <cstdint>
#include <vector>

#include "coreprune/point_set.hpp"

namespace coreprune {

inline constexpr double kDefaultRankTol = 1e-8;
inline constexpr double kDefaultMveeEps = 1e-6;
inline constexpr int kDefaultMveeMaxIter = 100000;

/// Orthonormal basis Y (d x r) and translation z of the affine hull of a point set.
struct AffineBasis {
  Matrix Y;
  Vector z;
  Index rank = 0;
};

/// E(G, c) = { x : (x - c)^T G (x - c) <= 1 }.
class Ellipsoid {
 public:
  Ellipsoid(Matrix G, Vector c);

  const Matrix& G() const noexcept { return G_; }
  const Vector& center() const noexcept { return c_; }
  Index dim() const noexcept { return c_.size(); }

  double membership(const Eigen::Ref<const Vector>& x) const;

 private:
  Matrix G_;
  Vector c_;
};

struct MveeResult {
  Ellipsoid ellipsoid;
  int iterations = 0;
  // Barycentric weights of the final Khachiyan iterate, one per input row.
  Vector weights;
  // max_i leverage / (r + 1) - 1 at termination.
  double gap = 0.0;
};

/// Affine rank only: number of singular values of the centered rows above
/// rank_tol * sigma_max. Returns 0 when the rows coincide numerically.
Index affine_rank(const Matrix& points, double rank_tol = kDefaultRankTol);

AffineBasis rank_and_basis(const PointSet& points, double rank_tol = kDefaultRankTol);

// (p - z) Y for every row; row order is preserved.
PointSet project(const PointSet& points, const AffineBasis& basis);
// Inverse of project: p' Y^T + z.
Matrix lift(const Matrix& projected, const AffineBasis& basis);

/// Khachiyan's barycentric coordinate ascent with Todd-Yildirim away steps.
/// The returned G is rescaled so the farthest input row sits on the boundary.
MveeResult mvee_detailed(const PointSet& points, double eps = kDefaultMveeEps,
                         int max_iter = kDefaultMveeMaxIter);
Ellipsoid mvee(const PointSet& points, double eps = kDefaultMveeEps,
               int max_iter = kDefaultMveeMaxIter);

/// Axis endpoints c +- factor * v_i / sqrt(lambda_i), eigenpairs in descending
/// eigenvalue order, + before -.
std::vector<Vector> shrunk_vertices(const Ellipsoid& ellipsoid, double factor);

enum class ReductionMethod { Pca, GaussianProjection };

struct Reduction {
  PointSet points;
  Matrix map;  // d x target_dim; reduced = P * map
};

/// Pca is uncentered (truncated SVD of the raw rows) so dot products with
/// queries through the map stay meaningful. GaussianProjection uses N(0, 1/k).
Reduction reduce_dimension(const PointSet& points, ReductionMethod method, Index target_dim,
                           std::uint64_t seed);

}  // namespace coreprune
