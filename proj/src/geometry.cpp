#include "coreprune/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coreprune/error.hpp"
#include "coreprune/log.hpp"
#include "coreprune/random.hpp"

namespace coreprune {

namespace {

// Relative level below which the centered rows are treated as one point.
constexpr double kIdenticalTol = 1e-13;

Vector singular_values(const Matrix& m) {
  if (std::min(m.rows(), m.cols()) <= 16) return Eigen::JacobiSVD<Matrix>(m).singularValues();
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

bool coincident(double sigma_max, const Matrix& points) {
  const double scale = points.rowwise().norm().maxCoeff();
  return sigma_max <= kIdenticalTol * scale * std::sqrt(static_cast<double>(points.rows()));
}

Index count_above(const Vector& sigma, double rank_tol) {
  const double cut = rank_tol * sigma(0);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

}  // namespace

Ellipsoid::Ellipsoid(Matrix G, Vector c) : G_(std::move(G)), c_(std::move(c)) {
  if (G_.rows() != G_.cols() || G_.rows() != c_.size())
    throw Error(ErrorKind::DimensionMismatch, "ellipsoid form and center sizes disagree");
  const double mag = std::max(1.0, G_.cwiseAbs().maxCoeff());
  if ((G_ - G_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * mag)
    throw Error(ErrorKind::NotPositiveDefinite, "ellipsoid form is not symmetric");
  Eigen::LLT<Matrix> llt(G_);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::NotPositiveDefinite, "ellipsoid form is not positive definite");
}

double Ellipsoid::membership(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != c_.size()) throw Error(ErrorKind::DimensionMismatch, "membership query size");
  const Vector d = x - c_;
  return d.dot(G_ * d);
}

Index affine_rank(const Matrix& points, double rank_tol) {
  if (points.rows() < 2) return 0;
  const Matrix centered = points.rowwise() - points.colwise().mean();
  const Vector sigma = singular_values(centered);
  if (sigma.size() == 0 || coincident(sigma(0), points)) return 0;
  return count_above(sigma, rank_tol);
}

AffineBasis rank_and_basis(const PointSet& points, double rank_tol) {
  if (!(rank_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "rank_tol must be positive");
  const Matrix& P = points.data();
  AffineBasis basis;
  basis.z = P.colwise().mean().transpose();
  const Matrix centered = P.rowwise() - basis.z.transpose();

  Vector sigma;
  Matrix V;
  if (std::min(P.rows(), P.cols()) <= 16) {
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    sigma = svd.singularValues();
    V = svd.matrixV();
  } else {
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    sigma = svd.singularValues();
    V = svd.matrixV();
  }
  if (P.rows() < 2 || sigma.size() == 0 || coincident(sigma(0), P))
    throw Error(ErrorKind::AllPointsIdentical, "centered point set is numerically zero");

  basis.rank = count_above(sigma, rank_tol);
  basis.Y = V.leftCols(basis.rank);
  return basis;
}

PointSet project(const PointSet& points, const AffineBasis& basis) {
  if (basis.Y.rows() != points.dim() || basis.z.size() != points.dim())
    throw Error(ErrorKind::DimensionMismatch, "basis dimension " + std::to_string(basis.Y.rows()) +
                                                  " != point dimension " + std::to_string(points.dim()));
  Matrix projected = (points.data().rowwise() - basis.z.transpose()) * basis.Y;
  if (points.has_weights()) return PointSet(std::move(projected), points.weights());
  return PointSet(std::move(projected));
}

Matrix lift(const Matrix& projected, const AffineBasis& basis) {
  if (projected.cols() != basis.Y.cols())
    throw Error(ErrorKind::DimensionMismatch, "projected width does not match basis rank");
  return (projected * basis.Y.transpose()).rowwise() + basis.z.transpose();
}

MveeResult mvee_detailed(const PointSet& points, double eps, int max_iter) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidParameter, "eps_mvee must be in (0,1)");
  if (max_iter < 1) throw Error(ErrorKind::InvalidParameter, "max_iter must be positive");
  const Index n = points.size();
  const Index r = points.dim();
  if (n <= r)
    throw Error(ErrorKind::DegenerateInput,
                std::to_string(n) + " points cannot span a " + std::to_string(r) + "-dim ellipsoid");
  if (affine_rank(points.data()) < r)
    throw Error(ErrorKind::DegenerateInput, "points are affinely rank deficient; project first");

  // Khachiyan iterations are affine invariant; condition by centering and scaling.
  const Vector mean = points.data().colwise().mean().transpose();
  Matrix X = points.data().rowwise() - mean.transpose();
  const double s = X.rowwise().norm().maxCoeff();
  X /= s;

  const Index D = r + 1;
  Matrix Q(D, n);
  Q.topRows(r) = X.transpose();
  Q.row(r).setOnes();

  Vector u = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Matrix Xinv;
  Vector omega;
  auto recompute = [&] {
    const Matrix M = Q * u.asDiagonal() * Q.transpose();
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::DegenerateInput, "moment matrix lost positive definiteness");
    Xinv = llt.solve(Matrix::Identity(D, D));
    omega = llt.matrixL().solve(Q).colwise().squaredNorm().transpose();
  };
  recompute();

  const double dD = static_cast<double>(D);
  int iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (; iter < max_iter; ++iter) {
    Index j = 0;
    const double kappa = omega.maxCoeff(&j);
    Index k = -1;
    double omega_min = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (u(i) > 0.0 && omega(i) < omega_min) {
        omega_min = omega(i);
        k = i;
      }
    }
    const double eps_plus = kappa / dD - 1.0;
    const double eps_minus = 1.0 - omega_min / dD;
    gap = eps_plus;
    if (eps_plus <= eps) {
      recompute();
      gap = omega.maxCoeff() / dD - 1.0;
      if (gap <= eps) {
        converged = true;
        break;
      }
      continue;
    }

    double a;
    double b;
    Index idx;
    if (eps_plus >= eps_minus || k < 0) {
      const double beta = (kappa - dD) / (dD * (kappa - 1.0));
      u *= 1.0 - beta;
      u(j) += beta;
      a = 1.0 - beta;
      b = beta;
      idx = j;
    } else {
      const double drop = u(k) / (1.0 - u(k));
      double beta = drop;
      if (omega_min - 1.0 > 1e-12) beta = std::min(beta, (dD - omega_min) / (dD * (omega_min - 1.0)));
      u *= 1.0 + beta;
      u(k) -= beta * 1.0;
      if (beta == drop || u(k) < 0.0) u(k) = 0.0;
      a = 1.0 + beta;
      b = -beta;
      idx = k;
    }

    // Sherman-Morrison on X' = a X + b q q^T.
    const Vector h = Xinv * Q.col(idx);
    const double wq = Q.col(idx).dot(h);
    const double ratio = b / a;
    const double denom = 1.0 + ratio * wq;
    if (std::abs(denom) < 1e-12) {
      recompute();
      continue;
    }
    const Vector g = Q.transpose() * h;
    Xinv = (Xinv - (ratio / denom) * h * h.transpose()) / a;
    omega = (omega - (ratio / denom) * g.cwiseAbs2()) / a;
    if ((iter + 1) % 256 == 0) recompute();
  }
  if (!converged)
    throw Error(ErrorKind::NoConvergence, "gap " + std::to_string(gap) + " after " +
                                              std::to_string(max_iter) + " iterations");
  log::debug("mvee converged in " + std::to_string(iter) + " iterations");

  const Vector c0 = X.transpose() * u;
  const Matrix M = X.transpose() * u.asDiagonal() * X - c0 * c0.transpose();
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::DegenerateInput, "shape matrix is singular");
  Matrix G0 = llt.solve(Matrix::Identity(r, r)) / static_cast<double>(r);
  G0 = (0.5 * (G0 + G0.transpose())).eval();

  const Matrix Xc = X.rowwise() - c0.transpose();
  const double max_membership = (Xc * G0).cwiseProduct(Xc).rowwise().sum().maxCoeff();
  G0 /= max_membership;

  Matrix G = G0 / (s * s);
  Vector c = mean + s * c0;
  return MveeResult{Ellipsoid(std::move(G), std::move(c)), iter, std::move(u), gap};
}

Ellipsoid mvee(const PointSet& points, double eps, int max_iter) {
  return mvee_detailed(points, eps, max_iter).ellipsoid;
}

std::vector<Vector> shrunk_vertices(const Ellipsoid& ellipsoid, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) throw Error(ErrorKind::InvalidParameter, "factor must be in (0,1]");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ellipsoid.G());
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::NotPositiveDefinite, "eigendecomposition failed");
  const Index r = ellipsoid.dim();
  std::vector<Vector> vertices;
  vertices.reserve(static_cast<std::size_t>(2 * r));
  for (Index i = r - 1; i >= 0; --i) {
    const double lambda = eig.eigenvalues()(i);
    if (!(lambda > 0.0)) throw Error(ErrorKind::NotPositiveDefinite, "non-positive eigenvalue");
    const Vector axis = (factor / std::sqrt(lambda)) * eig.eigenvectors().col(i);
    vertices.push_back(ellipsoid.center() + axis);
    vertices.push_back(ellipsoid.center() - axis);
  }
  return vertices;
}

Reduction reduce_dimension(const PointSet& points, ReductionMethod method, Index target_dim,
                           std::uint64_t seed) {
  const Index d = points.dim();
  if (target_dim < 1 || target_dim > d)
    throw Error(ErrorKind::DimensionMismatch,
                "target_dim " + std::to_string(target_dim) + " outside [1, " + std::to_string(d) + "]");
  Matrix map;
  if (method == ReductionMethod::Pca) {
    const Matrix& P = points.data();
    if (target_dim <= std::min(P.rows(), d)) {
      Eigen::BDCSVD<Matrix> svd(P, Eigen::ComputeThinV);
      map = svd.matrixV().leftCols(target_dim);
    } else {
      Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeFullV);
      map = svd.matrixV().leftCols(target_dim);
    }
    for (Index k = 0; k < map.cols(); ++k) {
      Index arg = 0;
      map.col(k).cwiseAbs().maxCoeff(&arg);
      if (map(arg, k) < 0.0) map.col(k) *= -1.0;
    }
  } else {
    Rng rng = make_rng(seed);
    map = standard_normal(d, target_dim, rng) / std::sqrt(static_cast<double>(target_dim));
  }
  Matrix reduced = points.data() * map;
  if (points.has_weights()) return {PointSet(std::move(reduced), points.weights()), std::move(map)};
  return {PointSet(std::move(reduced)), std::move(map)};
}

}  // namespace coreprune
