#pragma once

#include <cstdint>
#include <vector>

#include "coreprune/linf_coreset.hpp"

namespace coreprune {

/// Onion-peeling sensitivity upper bounds. s[i] = 2 rank[i]^1.5 / peel[i].
struct SensitivityMap {
  Vector s;
  std::vector<int> peel;
  std::vector<Index> rank;  // rank of the residual set at the peel of row i
  double total = 0.0;

  Index size() const noexcept { return s.size(); }
};

/// Sampled multiset (with replacement) and per-draw weights u.
struct WeightedCoreset {
  std::vector<Index> indices;
  std::vector<double> u;

  Index size() const noexcept { return static_cast<Index>(indices.size()); }
};

SensitivityMap onion_sensitivities(const PointSet& points, const InfCoresetOptions& options = {});

/// m i.i.d. draws with probability s/t; u = t w(p) / (m s(p)).
WeightedCoreset sample_coreset(const PointSet& points, const SensitivityMap& sens, Index m,
                               std::uint64_t seed);

struct SampleSplit {
  Index positive = 0;
  Index negative = 0;
};

/// Proportional allocation m+ = round(|P+| / |P| * m), each nonempty class
/// keeping at least one draw when m >= 2.
SampleSplit split_sample_size(Index n_positive, Index n_negative, Index m);

/// Sign-split weighted coreset: rows with w >= 0 and w < 0 are peeled
/// separately on the scaled rows w(q) q and sampled with their own totals.
WeightedCoreset gen_coreset(const PointSet& points, Index m, std::uint64_t seed,
                            const InfCoresetOptions& options = {});

/// Sensitivities for each sign class of a weighted set, laid out over all rows.
/// `positive_class[i]` tells which class row i belongs to; totals are per class.
struct SignedSensitivities {
  SensitivityMap map;
  std::vector<bool> positive_class;
  double total_positive = 0.0;
  double total_negative = 0.0;
  Index n_positive = 0;
  Index n_negative = 0;
};

SignedSensitivities signed_sensitivities(const PointSet& points,
                                         const InfCoresetOptions& options = {});

WeightedCoreset sample_signed(const PointSet& points, const SignedSensitivities& sens, Index m,
                              std::uint64_t seed);

/// ceil(c * (mu r^3.5 ln n / eps^2) * (d ln(max(mu r ln n, e)) + ln(1/delta))), at least 1.
Index sample_size_bound(Index n, Index d, Index r, double mu, double eps, double delta,
                        double c = 1.0);

}  // namespace coreprune
