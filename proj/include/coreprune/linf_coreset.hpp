#pragma once

#include <cstdint>
#include <vector>

#include "coreprune/geometry.hpp"

namespace coreprune {

struct InfCoresetOptions {
  double rank_tol = kDefaultRankTol;
  double mvee_eps = kDefaultMveeEps;
  int mvee_max_iter = kDefaultMveeMaxIter;
};

struct InfCoreset {
  std::vector<Index> indices;  // sorted, unique
  Index rank = 0;
};

/// Deterministic subset S of the rows such that for every X, v
///   max_P ||(q - v) X||_1 <= 2 r^1.5 max_S ||(q - v) X||_1,
/// with |S| <= 2 r (r + 1).
InfCoreset inf_coreset(const PointSet& points, const InfCoresetOptions& options = {});

/// Largest observed ratio max_P ||(q - v)X||_1 / max_S ||(q - v)X||_1 over
/// `trials` standard normal draws of X (d x j) and v. Trials where both maxima
/// are below 1e-12 are skipped.
double ratio_diagnostic(const PointSet& points, const std::vector<Index>& subset, int trials,
                        Index j, std::uint64_t seed);

}  // namespace coreprune
