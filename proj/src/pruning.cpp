#include "coreprune/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "coreprune/error.hpp"
#include "coreprune/log.hpp"
#include "coreprune/random.hpp"

namespace coreprune {

namespace {

void check_pair(const LayerSpec& layer, const LayerSpec& next) {
  if (next.inputs() != layer.outputs())
    throw Error(ErrorKind::DimensionMismatch, "next layer expects " + std::to_string(next.inputs()) +
                                                  " inputs, layer has " + std::to_string(layer.outputs()) +
                                                  " outputs");
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_rng(seed, stream);
  return rng();
}

}  // namespace

Matrix LayerSpec::pre_activation(const Matrix& inputs) const {
  if (inputs.cols() != W.cols()) throw Error(ErrorKind::DimensionMismatch, "input width mismatch");
  return (inputs * W.transpose()).rowwise() + b.transpose();
}

Matrix LayerSpec::forward(const Matrix& inputs) const {
  Matrix z = pre_activation(inputs);
  if (activation != Activation::Linear) z = z.unaryExpr([this](double v) { return apply(activation, v); });
  return z;
}

void NetworkSpec::validate() const {
  if (layers.empty()) throw Error(ErrorKind::InvalidParameter, "network has no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const LayerSpec& layer = layers[k];
    if (layer.W.rows() < 1 || layer.W.cols() < 1)
      throw Error(ErrorKind::InvalidParameter, "layer " + std::to_string(k) + " is empty");
    if (layer.b.size() != layer.W.rows())
      throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(k) + " bias length mismatch");
    if (!layer.W.allFinite() || !layer.b.allFinite())
      throw Error(ErrorKind::InvalidParameter, "layer " + std::to_string(k) + " has non-finite entries");
    if (k > 0 && layers[k - 1].outputs() != layer.inputs())
      throw Error(ErrorKind::DimensionMismatch, "layer " + std::to_string(k) + " input width " +
                                                    std::to_string(layer.inputs()) + " != previous output width " +
                                                    std::to_string(layers[k - 1].outputs()));
  }
}

Index NetworkSpec::parameters() const {
  Index total = 0;
  for (const LayerSpec& layer : layers) total += layer.parameters();
  return total;
}

Matrix NetworkSpec::forward(const Matrix& inputs) const {
  Matrix h = inputs;
  for (const LayerSpec& layer : layers) h = layer.forward(h);
  return h;
}

PointSet neuron_points(const LayerSpec& layer) {
  Matrix P(layer.outputs(), layer.inputs() + 1);
  P.leftCols(layer.inputs()) = layer.W;
  P.col(layer.inputs()) = layer.b;
  return PointSet(std::move(P));
}

SensitivityMap neuron_sensitivities(const LayerSpec& layer, const LayerSpec& next,
                                    const PruneOptions& options) {
  check_pair(layer, next);
  PointSet points = neuron_points(layer);
  if (options.reduction) {
    const Index target = std::min(options.target_dim, points.dim());
    points = reduce_dimension(points, *options.reduction, target, options.reduction_seed).points;
  }

  const Index n = layer.outputs();
  SensitivityMap best;
  best.s = Vector::Zero(n);
  best.peel.assign(static_cast<std::size_t>(n), 0);
  best.rank.assign(static_cast<std::size_t>(n), 0);
  for (Index j = 0; j < next.outputs(); ++j) {
    const PointSet weighted(points.data(), next.W.row(j).transpose());
    const SignedSensitivities column = signed_sensitivities(weighted, options.coreset);
    for (Index i = 0; i < n; ++i) {
      if (column.map.s(i) > best.s(i)) {
        best.s(i) = column.map.s(i);
        best.peel[static_cast<std::size_t>(i)] = column.map.peel[static_cast<std::size_t>(i)];
        best.rank[static_cast<std::size_t>(i)] = column.map.rank[static_cast<std::size_t>(i)];
      }
    }
  }
  best.total = best.s.sum();
  return best;
}

PrunedPair prune_layer(const LayerSpec& layer, const LayerSpec& next, const SensitivityMap& sens,
                       Index m, std::uint64_t seed) {
  check_pair(layer, next);
  const Index n = layer.outputs();
  if (m < 1) throw Error(ErrorKind::InvalidSampleSize, "budget must be >= 1");
  if (sens.size() != n) throw Error(ErrorKind::DimensionMismatch, "sensitivity map does not match layer");

  PrunedPair out;
  if (m >= n) {
    out.layer = layer;
    out.next = next;
    for (Index i = 0; i < n; ++i) out.kept.push_back(i);
    out.u.assign(static_cast<std::size_t>(n), 1.0);
    return out;
  }

  const WeightedCoreset sample = sample_coreset(PointSet(Matrix::Zero(n, 1)), sens, m, seed);
  std::map<Index, double> merged;
  for (std::size_t k = 0; k < sample.indices.size(); ++k) merged[sample.indices[k]] += sample.u[k];

  const auto kept = static_cast<Index>(merged.size());
  out.layer.activation = layer.activation;
  out.layer.W.resize(kept, layer.inputs());
  out.layer.b.resize(kept);
  out.next.activation = next.activation;
  out.next.W.resize(next.outputs(), kept);
  out.next.b = next.b;
  Index col = 0;
  for (const auto& [row, weight] : merged) {
    out.layer.W.row(col) = layer.W.row(row);
    out.layer.b(col) = layer.b(row);
    out.next.W.col(col) = weight * next.W.col(row);
    out.kept.push_back(row);
    out.u.push_back(weight);
    ++col;
  }
  return out;
}

PrunedPair prune_layer(const LayerSpec& layer, const LayerSpec& next, Index m, std::uint64_t seed,
                       const PruneOptions& options) {
  if (m >= layer.outputs()) {
    SensitivityMap unused;
    unused.s = Vector::Ones(layer.outputs());
    unused.total = static_cast<double>(layer.outputs());
    return prune_layer(layer, next, unused, m, seed);
  }
  return prune_layer(layer, next, neuron_sensitivities(layer, next, options), m, seed);
}

ErrorStats pair_output_error(const LayerSpec& layer, const LayerSpec& next, const PrunedPair& pruned,
                             Index probes, std::uint64_t seed) {
  if (probes < 1) throw Error(ErrorKind::InvalidParameter, "probes must be >= 1");
  Rng rng = make_rng(seed, 0);
  const Matrix inputs = standard_normal(probes, layer.inputs(), rng);
  const Matrix reference = next.pre_activation(layer.forward(inputs));
  const Matrix approx = pruned.next.pre_activation(pruned.layer.forward(inputs));

  ErrorStats stats;
  double sum = 0.0;
  for (Index p = 0; p < probes; ++p) {
    const double norm = reference.row(p).norm();
    if (norm < 1e-12) {
      ++stats.skipped;
      continue;
    }
    const double err = (approx.row(p) - reference.row(p)).norm() / norm;
    stats.max = std::max(stats.max, err);
    sum += err;
    ++stats.evaluated;
  }
  if (stats.evaluated > 0) stats.mean = sum / static_cast<double>(stats.evaluated);
  return stats;
}

PrunedNetwork prune_network(const NetworkSpec& net, const std::vector<Index>& budgets, std::uint64_t seed,
                            const PruneOptions& options) {
  net.validate();
  const std::size_t prunable = net.layers.size() - 1;
  if (budgets.size() != prunable)
    throw Error(ErrorKind::InvalidParameter, "expected " + std::to_string(prunable) + " budgets, got " +
                                                 std::to_string(budgets.size()));

  PrunedNetwork out;
  out.network = net;
  out.report.params_before = net.parameters();
  for (std::size_t l = 0; l < prunable; ++l) {
    const LayerSpec& layer = out.network.layers[l];
    const LayerSpec& next = out.network.layers[l + 1];
    Index budget = budgets[l];
    if (budget < 1) throw Error(ErrorKind::InvalidSampleSize, "budget for layer " + std::to_string(l) + " < 1");
    if (budget > layer.outputs()) {
      log::error(std::string(to_string(ErrorKind::BudgetTooLarge)) + ": layer " + std::to_string(l) +
                 " budget " + std::to_string(budget) + " clamped to width " + std::to_string(layer.outputs()));
      budget = layer.outputs();
    }
    PrunedPair pruned = prune_layer(layer, next, budget, derived_seed(seed, l), options);
    const ErrorStats err = pair_output_error(layer, next, pruned, options.probes, derived_seed(seed, l + 1000));

    LayerReport row;
    row.layer = static_cast<Index>(l);
    row.total = layer.outputs();
    row.kept = pruned.kept;
    row.u = pruned.u;
    row.err_mean = err.mean;
    row.err_max = err.max;
    out.report.layers.push_back(std::move(row));

    out.network.layers[l] = std::move(pruned.layer);
    out.network.layers[l + 1] = std::move(pruned.next);
  }
  out.network.validate();

  for (std::size_t l = 0; l < prunable; ++l) {
    const double before = static_cast<double>(net.layers[l].parameters());
    const double after = static_cast<double>(out.network.layers[l].parameters());
    out.report.layers[l].pr_percent = 100.0 * (1.0 - after / before);
  }
  out.report.params_after = out.network.parameters();
  out.report.pr_percent = 100.0 * (1.0 - static_cast<double>(out.report.params_after) /
                                             static_cast<double>(out.report.params_before));
  return out;
}

Index parameters_with_widths(const NetworkSpec& net, const std::vector<Index>& widths) {
  if (widths.size() + 1 != net.layers.size())
    throw Error(ErrorKind::InvalidParameter, "one width per hidden layer required");
  Index total = 0;
  Index in = net.layers.front().inputs();
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const Index out = l < widths.size() ? widths[l] : net.layers[l].outputs();
    total += in * out + out;
    in = out;
  }
  return total;
}

std::vector<Index> budgets_for_pruning_ratio(const NetworkSpec& net, double target_pr) {
  net.validate();
  if (!(target_pr >= 0.0 && target_pr <= 100.0))
    throw Error(ErrorKind::InvalidParameter, "target pruning ratio must be in [0, 100]");
  const double before = static_cast<double>(net.parameters());
  std::vector<Index> best;
  double best_gap = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 20000;
  for (int g = 0; g <= kGrid; ++g) {
    const double keep = static_cast<double>(g) / kGrid;
    std::vector<Index> widths;
    for (std::size_t l = 0; l + 1 < net.layers.size(); ++l) {
      const double w = keep * static_cast<double>(net.layers[l].outputs());
      widths.push_back(std::clamp<Index>(std::llround(w), 1, net.layers[l].outputs()));
    }
    const double pr = 100.0 * (1.0 - static_cast<double>(parameters_with_widths(net, widths)) / before);
    const double gap = std::abs(pr - target_pr);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(widths);
    }
  }
  return best;
}

}  // namespace coreprune
