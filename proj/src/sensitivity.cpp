#include "coreprune/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "coreprune/error.hpp"
#include "coreprune/log.hpp"
#include "coreprune/random.hpp"

namespace coreprune {

namespace {

double peel_sensitivity(Index rank, int level) {
  const double r = static_cast<double>(std::max<Index>(rank, 1));
  return 2.0 * std::pow(r, 1.5) / static_cast<double>(level);
}

// Inverse-CDF draws over `probabilities` restricted to `rows`.
std::vector<Index> draw(const std::vector<Index>& rows, const Vector& s, Index m, Rng& rng) {
  std::vector<double> cumulative(rows.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    acc += s(rows[k]);
    cumulative[k] = acc;
  }
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) {
    const double target = uniform01(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    if (it == cumulative.end()) --it;
    out.push_back(rows[static_cast<std::size_t>(it - cumulative.begin())]);
  }
  return out;
}

}  // namespace

SensitivityMap onion_sensitivities(const PointSet& points, const InfCoresetOptions& options) {
  const Index n = points.size();
  SensitivityMap map;
  map.s = Vector::Zero(n);
  map.peel.assign(static_cast<std::size_t>(n), 0);
  map.rank.assign(static_cast<std::size_t>(n), 0);

  std::vector<Index> alive(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) alive[static_cast<std::size_t>(i)] = i;

  int level = 1;
  Index residual_rank = 0;
  while (!alive.empty()) {
    const PointSet residual = points.select(alive);
    residual_rank = residual.size() >= 2 ? affine_rank(residual.data(), options.rank_tol) : 0;
    const auto q = static_cast<Index>(alive.size());
    if (residual_rank < 1 || q < 2 * residual_rank * residual_rank) break;

    const InfCoreset peel = inf_coreset(residual, options);
    const double s = peel_sensitivity(residual_rank, level);
    std::vector<bool> removed(alive.size(), false);
    for (Index local : peel.indices) {
      const Index row = alive[static_cast<std::size_t>(local)];
      map.s(row) = s;
      map.peel[static_cast<std::size_t>(row)] = level;
      map.rank[static_cast<std::size_t>(row)] = residual_rank;
      removed[static_cast<std::size_t>(local)] = true;
    }
    std::vector<Index> next;
    next.reserve(alive.size());
    for (std::size_t k = 0; k < alive.size(); ++k)
      if (!removed[k]) next.push_back(alive[k]);
    alive = std::move(next);
    log::debug("peel " + std::to_string(level) + ": removed " + std::to_string(peel.indices.size()) +
               " rows at rank " + std::to_string(residual_rank));
    ++level;
  }

  // A residual that collapsed to one point is scored as rank 1.
  const Index final_rank = std::max<Index>(residual_rank, 1);
  for (Index row : alive) {
    map.s(row) = peel_sensitivity(final_rank, level);
    map.peel[static_cast<std::size_t>(row)] = level;
    map.rank[static_cast<std::size_t>(row)] = final_rank;
  }
  map.total = map.s.sum();
  return map;
}

WeightedCoreset sample_coreset(const PointSet& points, const SensitivityMap& sens, Index m,
                               std::uint64_t seed) {
  if (m < 1) throw Error(ErrorKind::InvalidSampleSize, "sample size must be >= 1");
  if (sens.size() != points.size())
    throw Error(ErrorKind::DimensionMismatch, "sensitivity map does not match point set");
  std::vector<Index> rows(static_cast<std::size_t>(points.size()));
  for (Index i = 0; i < points.size(); ++i) rows[static_cast<std::size_t>(i)] = i;

  Rng rng = make_rng(seed, 0);
  WeightedCoreset out;
  out.indices = draw(rows, sens.s, m, rng);
  out.u.reserve(out.indices.size());
  for (Index i : out.indices)
    out.u.push_back(sens.total * points.weight(i) / (static_cast<double>(m) * sens.s(i)));
  return out;
}

SampleSplit split_sample_size(Index n_positive, Index n_negative, Index m) {
  if (m < 1) throw Error(ErrorKind::InvalidSampleSize, "sample size must be >= 1");
  if (n_negative == 0) return {m, 0};
  if (n_positive == 0) return {0, m};
  if (m < 2) throw Error(ErrorKind::InvalidSampleSize, "both sign classes need a draw; m must be >= 2");
  const double share = static_cast<double>(n_positive) / static_cast<double>(n_positive + n_negative);
  const auto positive = std::clamp<Index>(std::llround(share * static_cast<double>(m)), 1, m - 1);
  return {positive, m - positive};
}

SignedSensitivities signed_sensitivities(const PointSet& points, const InfCoresetOptions& options) {
  const Index n = points.size();
  SignedSensitivities out;
  out.map.s = Vector::Zero(n);
  out.map.peel.assign(static_cast<std::size_t>(n), 0);
  out.map.rank.assign(static_cast<std::size_t>(n), 0);
  out.positive_class.assign(static_cast<std::size_t>(n), true);

  std::vector<Index> rows[2];
  for (Index i = 0; i < n; ++i) {
    const bool positive = points.weight(i) >= 0.0;
    out.positive_class[static_cast<std::size_t>(i)] = positive;
    rows[positive ? 0 : 1].push_back(i);
  }
  for (int cls = 0; cls < 2; ++cls) {
    if (rows[cls].empty()) continue;
    Matrix scaled(static_cast<Index>(rows[cls].size()), points.dim());
    for (std::size_t k = 0; k < rows[cls].size(); ++k)
      scaled.row(static_cast<Index>(k)) = points.weight(rows[cls][k]) * points.data().row(rows[cls][k]);
    const SensitivityMap local = onion_sensitivities(PointSet(std::move(scaled)), options);
    for (std::size_t k = 0; k < rows[cls].size(); ++k) {
      const Index row = rows[cls][k];
      out.map.s(row) = local.s(static_cast<Index>(k));
      out.map.peel[static_cast<std::size_t>(row)] = local.peel[k];
      out.map.rank[static_cast<std::size_t>(row)] = local.rank[k];
    }
    (cls == 0 ? out.total_positive : out.total_negative) = local.total;
  }
  out.n_positive = static_cast<Index>(rows[0].size());
  out.n_negative = static_cast<Index>(rows[1].size());
  out.map.total = out.total_positive + out.total_negative;
  return out;
}

WeightedCoreset sample_signed(const PointSet& points, const SignedSensitivities& sens, Index m,
                              std::uint64_t seed) {
  if (sens.map.size() != points.size())
    throw Error(ErrorKind::DimensionMismatch, "sensitivity map does not match point set");
  const SampleSplit split = split_sample_size(sens.n_positive, sens.n_negative, m);

  WeightedCoreset out;
  for (int cls = 0; cls < 2; ++cls) {
    const Index budget = cls == 0 ? split.positive : split.negative;
    if (budget == 0) continue;
    std::vector<Index> rows;
    for (Index i = 0; i < points.size(); ++i)
      if (sens.positive_class[static_cast<std::size_t>(i)] == (cls == 0)) rows.push_back(i);
    const double total = cls == 0 ? sens.total_positive : sens.total_negative;
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(cls));
    for (Index i : draw(rows, sens.map.s, budget, rng)) {
      out.indices.push_back(i);
      out.u.push_back(total * points.weight(i) / (static_cast<double>(budget) * sens.map.s(i)));
    }
  }
  return out;
}

WeightedCoreset gen_coreset(const PointSet& points, Index m, std::uint64_t seed,
                            const InfCoresetOptions& options) {
  return sample_signed(points, signed_sensitivities(points, options), m, seed);
}

Index sample_size_bound(Index n, Index d, Index r, double mu, double eps, double delta, double c) {
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorKind::InvalidParameter, "eps must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidParameter, "delta must be in (0,1)");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(ErrorKind::InvalidParameter, "mu must be >= 0");
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidParameter, "c must be positive");
  if (n < 1 || d < 1 || r < 1) throw Error(ErrorKind::InvalidParameter, "n, d, r must be >= 1");
  const double ln_n = std::log(static_cast<double>(n));
  const double rr = static_cast<double>(r);
  const double lead = mu * std::pow(rr, 3.5) * ln_n / (eps * eps);
  const double inner = static_cast<double>(d) * std::log(std::max(mu * rr * ln_n, std::numbers::e)) +
                       std::log(1.0 / delta);
  const double m = std::ceil(c * lead * inner);
  return std::max<Index>(1, static_cast<Index>(m));
}

}  // namespace coreprune
