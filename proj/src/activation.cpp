#include "coreprune/activation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "coreprune/error.hpp"
#include "coreprune/random.hpp"

namespace coreprune {

namespace {

constexpr double kDegenerate = 1e-12;

void check_query(const PointSet& points, Index size) {
  if (size != points.dim())
    throw Error(ErrorKind::DimensionMismatch, "query has " + std::to_string(size) +
                                                  " coordinates, points have " + std::to_string(points.dim()));
}

}  // namespace

std::optional<NiceHinge> nice_hinge_params(Activation kind) {
  switch (kind) {
    case Activation::Relu: return NiceHinge{1.0, 0.0, 0.0};
    case Activation::Hinge: return NiceHinge{1.0, 1.0, 1.0};
    case Activation::LogLoss:
    case Activation::Softplus: return NiceHinge{1.0, std::numbers::ln2, std::numbers::ln2};
    default: return std::nullopt;
  }
}

NiceHingeCheck check_nice_hinge(Activation kind, const NiceHinge& params, double lo, double hi,
                                Index grid_points) {
  if (grid_points < 2 || !(hi > lo)) throw Error(ErrorKind::InvalidParameter, "grid needs hi > lo and >= 2 points");
  NiceHingeCheck out;
  out.grid_points = grid_points;
  out.min_nonnegative = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  double prev_z = lo;
  double prev = apply(kind, lo);
  for (Index k = 0; k < grid_points; ++k) {
    const double z = k + 1 == grid_points ? hi : lo + step * static_cast<double>(k);
    const double phi = apply(kind, z);
    if (k > 0) out.max_slope = std::max(out.max_slope, std::abs(phi - prev) / (z - prev_z));
    out.max_relu_gap = std::max(out.max_relu_gap, std::abs(phi - apply(Activation::Relu, z)));
    if (z >= 0.0) out.min_nonnegative = std::min(out.min_nonnegative, phi);
    prev_z = z;
    prev = phi;
  }
  out.passed = out.max_slope <= params.lipschitz + 1e-6 && out.max_relu_gap <= params.a1 + 1e-12 &&
               out.min_nonnegative >= params.a2 - 1e-12;
  return out;
}

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::Relu: return "relu";
    case Activation::Hinge: return "hinge";
    case Activation::LogLoss: return "logloss";
    case Activation::Softplus: return "softplus";
    case Activation::Abs: return "abs";
    case Activation::Linear: return "linear";
  }
  return "relu";
}

Activation activation_from_string(std::string_view tag) {
  for (Activation a : {Activation::Relu, Activation::Hinge, Activation::LogLoss, Activation::Softplus,
                       Activation::Abs, Activation::Linear}) {
    if (to_string(a) == tag) return a;
  }
  throw Error(ErrorKind::InvalidParameter, "unknown activation '" + std::string(tag) + "'");
}

double apply(Activation kind, double z) {
  switch (kind) {
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Hinge: return std::max(0.0, 1.0 + z);
    case Activation::LogLoss:
    case Activation::Softplus: return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    case Activation::Abs: return std::abs(z);
    case Activation::Linear: return z;
  }
  return z;
}

Vector apply(Activation kind, const Vector& z) {
  return z.unaryExpr([kind](double v) { return apply(kind, v); });
}

double layer_cost(const PointSet& points, const Eigen::Ref<const Vector>& query, Activation kind) {
  check_query(points, query.size());
  const Vector z = points.data() * query;
  double cost = 0.0;
  for (Index i = 0; i < z.size(); ++i) cost += points.weight(i) * apply(kind, z(i));
  return cost;
}

double coreset_cost(const PointSet& points, const WeightedCoreset& coreset,
                    const Eigen::Ref<const Vector>& query, Activation kind) {
  check_query(points, query.size());
  double cost = 0.0;
  for (std::size_t k = 0; k < coreset.indices.size(); ++k)
    cost += coreset.u[k] * apply(kind, points.data().row(coreset.indices[k]).dot(query));
  return cost;
}

WeightedCoreset full_coreset(const PointSet& points) {
  WeightedCoreset out;
  for (Index i = 0; i < points.size(); ++i) {
    out.indices.push_back(i);
    out.u.push_back(points.weight(i));
  }
  return out;
}

ErrorStats coreset_rel_error(const PointSet& points, const WeightedCoreset& coreset,
                             const Matrix& queries, Activation kind) {
  if (queries.rows() < 1) throw Error(ErrorKind::InvalidParameter, "no queries");
  check_query(points, queries.cols());
  for (Index i : coreset.indices)
    if (i < 0 || i >= points.size()) throw Error(ErrorKind::InvalidParameter, "coreset index out of range");
  if (coreset.indices.size() != coreset.u.size())
    throw Error(ErrorKind::DimensionMismatch, "coreset indices and weights differ in length");

  ErrorStats stats;
  double sum = 0.0;
  for (Index q = 0; q < queries.rows(); ++q) {
    const Vector x = queries.row(q).transpose();
    const double full = layer_cost(points, x, kind);
    if (std::abs(full) < kDegenerate) {
      ++stats.skipped;
      continue;
    }
    const double err = std::abs(1.0 - coreset_cost(points, coreset, x, kind) / full);
    stats.max = std::max(stats.max, err);
    sum += err;
    ++stats.evaluated;
  }
  if (stats.evaluated == 0) throw Error(ErrorKind::AllQueriesDegenerate, "every query had a zero full cost");
  stats.mean = sum / static_cast<double>(stats.evaluated);
  return stats;
}

std::optional<double> complexity_ratio(const PointSet& points, const Eigen::Ref<const Vector>& x) {
  check_query(points, x.size());
  const Vector z = points.data() * x;
  double negative = 0.0;
  double positive = 0.0;
  for (Index i = 0; i < z.size(); ++i) (z(i) > 0.0 ? positive : negative) += std::abs(z(i));
  if (positive < kDegenerate) return std::nullopt;
  return negative / positive;
}

ComplexityEstimate complexity_estimate(const PointSet& points, Index n_random, int refine_steps,
                                       std::uint64_t seed) {
  if (n_random < 1) throw Error(ErrorKind::InvalidParameter, "n_random must be >= 1");
  if (refine_steps < 0) throw Error(ErrorKind::InvalidParameter, "refine_steps must be >= 0");
  const Index d = points.dim();
  if ((points.data().col(d - 1).array() - 1.0).abs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::InvalidParameter, "last coordinate of every row must be 1");

  ComplexityEstimate est;
  bool any = false;
  auto consider = [&](const Vector& x) {
    if (const auto ratio = complexity_ratio(points, x)) {
      est.mu = any ? std::max(est.mu, *ratio) : *ratio;
      any = true;
      return *ratio;
    }
    return -std::numeric_limits<double>::infinity();
  };

  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (Index q = 0; q < n_random; ++q) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(q));
    Vector x = standard_normal(d, 1, rng);
    if (std::isfinite(consider(x))) {
      ++est.valid_queries;
    } else {
      ++est.skipped;
    }
    if (refine_steps == 0) continue;

    // With rows (a_i, 1) the bias t only matters on (-max a, -min a): the
    // positive side is empty to the left and everything is positive to the right.
    const Vector a = points.data().leftCols(d - 1) * x.head(d - 1);
    double lo = -a.maxCoeff();
    double hi = -a.minCoeff();
    if (!(hi - lo > 1e-12)) continue;
    auto eval = [&](double t) {
      x(d - 1) = t;
      return consider(x);
    };
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = eval(x1);
    if (refine_steps < 2) continue;
    double f2 = eval(x2);
    for (int step = 2; step < refine_steps; ++step) {
      if (f1 >= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = eval(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = eval(x2);
      }
    }
  }
  if (!any) throw Error(ErrorKind::NoValidQuery, "no query had a nonempty positive side");
  return est;
}

}  // namespace coreprune
