#include "coreprune/linf_coreset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coreprune/caratheodory.hpp"
#include "coreprune/error.hpp"
#include "coreprune/log.hpp"
#include "coreprune/random.hpp"

namespace coreprune {

namespace {

MveeResult mvee_with_retry(const PointSet& points, const InfCoresetOptions& options) {
  try {
    return mvee_detailed(points, options.mvee_eps, options.mvee_max_iter);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoConvergence) throw;
    const double relaxed = std::min(0.5, options.mvee_eps * 10.0);
    log::info("mvee did not converge, retrying with eps " + std::to_string(relaxed));
    return mvee_detailed(points, relaxed, options.mvee_max_iter);
  }
}

}  // namespace

InfCoreset inf_coreset(const PointSet& points, const InfCoresetOptions& options) {
  InfCoreset out;
  if (points.size() == 1) {
    out.indices = {0};
    return out;
  }
  const AffineBasis basis = rank_and_basis(points, options.rank_tol);
  const PointSet projected = project(points, basis);
  out.rank = basis.rank;

  const MveeResult fit = mvee_with_retry(projected, options);
  const std::vector<Vector> vertices =
      shrunk_vertices(fit.ellipsoid, 1.0 / static_cast<double>(basis.rank));

  // Row order of `projected` matches `points`, so Caratheodory indices map back directly.
  for (const Vector& vertex : vertices) {
    const ConvexDecomposition decomposition = cara(vertex, projected);
    out.indices.insert(out.indices.end(), decomposition.indices.begin(), decomposition.indices.end());
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.indices.erase(std::unique(out.indices.begin(), out.indices.end()), out.indices.end());
  return out;
}

double ratio_diagnostic(const PointSet& points, const std::vector<Index>& subset, int trials, Index j,
                        std::uint64_t seed) {
  const Index d = points.dim();
  if (trials < 1) throw Error(ErrorKind::InvalidParameter, "trials must be >= 1");
  if (j < 1 || j > std::max<Index>(1, d - 1))
    throw Error(ErrorKind::InvalidParameter, "j must be in [1, d-1]");
  if (subset.empty()) throw Error(ErrorKind::InvalidParameter, "subset is empty");
  for (Index i : subset)
    if (i < 0 || i >= points.size()) throw Error(ErrorKind::InvalidParameter, "subset index out of range");

  double worst = 0.0;
  bool any = false;
  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    const Matrix X = standard_normal(d, j, rng);
    const Vector v = standard_normal(d, 1, rng);
    const Vector norms = ((points.data().rowwise() - v.transpose()) * X).cwiseAbs().rowwise().sum();
    const double full = norms.maxCoeff();
    double sub = 0.0;
    for (Index i : subset) sub = std::max(sub, norms(i));
    if (full < 1e-12 && sub < 1e-12) continue;
    any = true;
    worst = std::max(worst, sub < 1e-12 ? std::numeric_limits<double>::infinity() : full / sub);
  }
  if (!any) throw Error(ErrorKind::NumericalBreakdown, "every trial had a zero denominator");
  return worst;
}

}  // namespace coreprune
