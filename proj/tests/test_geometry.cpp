#include <doctest.h>

#include <cmath>

#include "coreprune/error.hpp"
#include "coreprune/geometry.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace coreprune;

using support::error_of;
using support::rows;

TEST_CASE("point set validation") {
  CHECK(error_of([] { PointSet(Matrix(0, 2)); }) == ErrorKind::InvalidParameter);
  Matrix bad = Matrix::Ones(2, 2);
  bad(1, 1) = std::nan("");
  CHECK(error_of([&] { PointSet{bad}; }) == ErrorKind::InvalidParameter);
  CHECK(error_of([] { PointSet(Matrix::Ones(3, 2), Vector::Ones(2)); }) == ErrorKind::DimensionMismatch);
  const PointSet p(rows({{3, 4}, {1, 0}}));
  CHECK(p.scale() == doctest::Approx(5.0));
  CHECK(p.weights() == Vector::Ones(2));
}

TEST_CASE("rank of collinear points") {
  const PointSet p(rows({{0, 0}, {1, 0}, {2, 0}}));
  const AffineBasis b = rank_and_basis(p);
  CHECK(b.rank == 1);
  CHECK(b.z(0) == doctest::Approx(1.0));
  CHECK(b.z(1) == doctest::Approx(0.0));
  CHECK(std::abs(b.Y(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(b.Y(1, 0)) < 1e-12);
}

TEST_CASE("rank of a triangle") {
  const PointSet p(rows({{0, 0}, {1, 0}, {0, 1}}));
  const AffineBasis b = rank_and_basis(p);
  CHECK(b.rank == 2);
  CHECK((b.Y.transpose() * b.Y - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("rank recovers a noisy affine subspace") {
  std::mt19937_64 rng(11);
  const PointSet p(oracle::affine_cloud(200, 20, 5, rng, 1e-12));
  const AffineBasis b = rank_and_basis(p);
  CHECK(b.rank == 5);
  CHECK((b.Y.transpose() * b.Y - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-9);
  for (Index i = 0; i < p.size(); ++i) {
    const Vector d = p.row(i).transpose() - b.z;
    CHECK((d - b.Y * (b.Y.transpose() * d)).norm() <= kDefaultRankTol * p.scale());
  }
}

TEST_CASE("identical points are rejected") {
  CHECK(error_of([] { rank_and_basis(PointSet(Matrix::Ones(4, 3))); }) == ErrorKind::AllPointsIdentical);
  CHECK(error_of([] { rank_and_basis(PointSet(Matrix::Ones(2, 2)), 0.0); }) == ErrorKind::InvalidParameter);
  CHECK(affine_rank(Matrix::Ones(4, 3)) == 0);
}

TEST_CASE("projection of collinear points") {
  const PointSet p(rows({{0, 0}, {1, 0}, {2, 0}}));
  const PointSet q = project(p, rank_and_basis(p));
  REQUIRE(q.dim() == 1);
  const double sign = q.data()(0, 0) < 0 ? 1.0 : -1.0;
  CHECK(sign * q.data()(0, 0) == doctest::Approx(-1.0));
  CHECK(std::abs(q.data()(1, 0)) < 1e-12);
  CHECK(sign * q.data()(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("projection with the identity basis is the identity") {
  std::mt19937_64 rng(3);
  const PointSet p(oracle::gaussian(10, 4, rng));
  const AffineBasis b{Matrix::Identity(4, 4), Vector::Zero(4), 4};
  CHECK(project(p, b).data() == p.data());
}

TEST_CASE("projection round trip") {
  std::mt19937_64 rng(5);
  const PointSet p(oracle::affine_cloud(200, 20, 5, rng));
  const AffineBasis b = rank_and_basis(p);
  const Matrix back = lift(project(p, b).data(), b);
  for (Index i = 0; i < p.size(); ++i)
    CHECK((back.row(i) - p.data().row(i)).norm() <= 1e-9 * p.data().row(i).norm());
  CHECK(error_of([&] { project(PointSet(Matrix::Ones(3, 7)), b); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("mvee of a square is the circumscribed circle") {
  const Ellipsoid e = mvee(PointSet(rows({{1, 1}, {1, -1}, {-1, 1}, {-1, -1}})));
  CHECK((e.G() - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(e.center().cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("mvee of an interval") {
  const Ellipsoid e = mvee(PointSet(rows({{0}, {1}})));
  CHECK(e.center()(0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(e.G()(0, 0) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("mvee sandwich on random clouds") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::mt19937_64 rng(seed);
    const Index r = 1 + static_cast<Index>(seed % 6);
    const Index n = r + 2 + static_cast<Index>((seed * 37) % 120);
    const PointSet p(oracle::gaussian(n, r, rng));
    const MveeResult fit = mvee_detailed(p);
    for (Index i = 0; i < n; ++i) CHECK(fit.ellipsoid.membership(p.row(i).transpose()) <= 1.0 + kDefaultMveeEps);
    CHECK(fit.weights.sum() == doctest::Approx(1.0));
    CHECK(fit.gap <= kDefaultMveeEps);
    for (const Vector& v : shrunk_vertices(fit.ellipsoid, 1.0 / static_cast<double>(r)))
      CHECK(oracle::hull_distance(p.data(), v) <= 1e-7 * std::max(1.0, p.scale()));
  }
}

TEST_CASE("mvee error paths") {
  CHECK(error_of([] { mvee(PointSet(rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}}))); }) == ErrorKind::DegenerateInput);
  CHECK(error_of([] { mvee(PointSet(rows({{0, 0}, {1, 0}}))); }) == ErrorKind::DegenerateInput);
  std::mt19937_64 rng(2);
  const PointSet p(oracle::gaussian(60, 4, rng));
  CHECK(error_of([&] { mvee(p, 1e-6, 1); }) == ErrorKind::NoConvergence);
  CHECK(error_of([&] { mvee(p, 0.0); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("ellipsoid validation") {
  Matrix G(2, 2);
  G << 1, 0, 0, -1;
  CHECK(error_of([&] { Ellipsoid(G, Vector::Zero(2)); }) == ErrorKind::NotPositiveDefinite);
  Matrix A(2, 2);
  A << 1, 0.5, 0, 1;
  CHECK(error_of([&] { Ellipsoid(A, Vector::Zero(2)); }) == ErrorKind::NotPositiveDefinite);
  CHECK(error_of([] { Ellipsoid(Matrix::Identity(2, 2), Vector::Zero(3)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("vertices of the unit circle") {
  const Ellipsoid e(Matrix::Identity(2, 2), Vector::Zero(2));
  const auto v = shrunk_vertices(e, 1.0);
  REQUIRE(v.size() == 4);
  for (const Vector& p : v) {
    CHECK(p.norm() == doctest::Approx(1.0));
    CHECK(std::min(std::abs(p(0)), std::abs(p(1))) < 1e-12);
  }
  CHECK((v[0] + v[1]).norm() < 1e-12);
  CHECK((v[2] + v[3]).norm() < 1e-12);
}

TEST_CASE("vertices of an axis-aligned ellipse") {
  Matrix G = Matrix::Zero(2, 2);
  G(0, 0) = 0.25;
  G(1, 1) = 1.0;
  Vector c(2);
  c << 1, 0;
  const auto v = shrunk_vertices(Ellipsoid(G, c), 1.0);
  REQUIRE(v.size() == 4);
  const Matrix expected = rows({{1, 1}, {1, -1}, {3, 0}, {-1, 0}});
  for (int k = 0; k < 4; ++k) {
    const Vector e = expected.row(k).transpose();
    const bool same = (v[k] - e).norm() < 1e-12;
    const bool flipped = k % 2 == 0 && (v[k] - expected.row(k + 1).transpose()).norm() < 1e-12;
    const bool flipped_back = k % 2 == 1 && (v[k] - expected.row(k - 1).transpose()).norm() < 1e-12;
    CHECK((same || flipped || flipped_back));
  }
}

TEST_CASE("shrunk vertices of the square ellipse") {
  const Ellipsoid e(0.5 * Matrix::Identity(2, 2), Vector::Zero(2));
  const auto v = shrunk_vertices(e, 0.5);
  REQUIRE(v.size() == 4);
  for (const Vector& p : v) {
    CHECK(p.norm() == doctest::Approx(std::sqrt(2.0) / 2.0));
    CHECK(e.membership(p) == doctest::Approx(0.25).epsilon(1e-9));
  }
  CHECK(error_of([&] { shrunk_vertices(e, 0.0); }) == ErrorKind::InvalidParameter);
  CHECK(error_of([&] { shrunk_vertices(e, 1.5); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("vertex membership equals the squared factor") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix A = oracle::gaussian(4, 4, rng);
    const Matrix G = A * A.transpose() + 0.1 * Matrix::Identity(4, 4);
    const Ellipsoid e(G, oracle::gaussian(4, 1, rng));
    const double f = 0.1 + 0.09 * trial;
    for (const Vector& p : shrunk_vertices(e, f)) CHECK(std::abs(e.membership(p) - f * f) <= 1e-9);
  }
}

TEST_CASE("full-dimension pca is a rotation") {
  std::mt19937_64 rng(23);
  const PointSet p(oracle::gaussian(30, 6, rng));
  const Reduction red = reduce_dimension(p, ReductionMethod::Pca, 6, 0);
  for (Index i = 0; i < 30; ++i)
    for (Index j = 0; j < 30; ++j) {
      const double a = (p.data().row(i) - p.data().row(j)).norm();
      const double b = (red.points.data().row(i) - red.points.data().row(j)).norm();
      CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, a));
    }
}

TEST_CASE("pca matches truncated svd") {
  std::mt19937_64 rng(29);
  const Matrix P = oracle::gaussian(80, 5, rng) * oracle::gaussian(5, 20, rng);
  const Reduction red = reduce_dimension(PointSet(P), ReductionMethod::Pca, 5, 0);
  CHECK(red.map.rows() == 20);
  CHECK(red.map.cols() == 5);
  Eigen::JacobiSVD<Matrix> svd(P, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix truncated = svd.matrixU().leftCols(5) * svd.singularValues().head(5).asDiagonal() *
                           svd.matrixV().leftCols(5).transpose();
  const Matrix rebuilt = red.points.data() * red.map.transpose();
  CHECK(oracle::rel_error(rebuilt, truncated) <= 1e-9);
  CHECK(oracle::rel_error(rebuilt, P) <= 1e-9);
}

TEST_CASE("gaussian projection is deterministic") {
  std::mt19937_64 rng(31);
  const PointSet p(oracle::gaussian(40, 12, rng));
  const Reduction a = reduce_dimension(p, ReductionMethod::GaussianProjection, 4, 99);
  const Reduction b = reduce_dimension(p, ReductionMethod::GaussianProjection, 4, 99);
  const Reduction c = reduce_dimension(p, ReductionMethod::GaussianProjection, 4, 100);
  CHECK(a.points.data() == b.points.data());
  CHECK(a.map == b.map);
  CHECK(a.map != c.map);
  CHECK((a.points.data() - p.data() * a.map).cwiseAbs().maxCoeff() == 0.0);
  CHECK(error_of([&] { reduce_dimension(p, ReductionMethod::Pca, 0, 0); }) == ErrorKind::DimensionMismatch);
  CHECK(error_of([&] { reduce_dimension(p, ReductionMethod::Pca, 13, 0); }) == ErrorKind::DimensionMismatch);
}
