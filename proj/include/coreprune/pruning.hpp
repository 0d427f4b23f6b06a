#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coreprune/activation.hpp"
#include "coreprune/geometry.hpp"

namespace coreprune {

/// out = activation(W x + b), W is n_out x n_in.
struct LayerSpec {
  Matrix W;
  Vector b;
  Activation activation = Activation::Relu;

  Index inputs() const noexcept { return W.cols(); }
  Index outputs() const noexcept { return W.rows(); }
  Index parameters() const noexcept { return W.size() + b.size(); }

  // Pre-activations for a batch of inputs stored as rows.
  Matrix pre_activation(const Matrix& inputs) const;
  Matrix forward(const Matrix& inputs) const;
};

struct NetworkSpec {
  std::vector<LayerSpec> layers;

  // Throws DimensionMismatch / InvalidParameter when the chain is broken.
  void validate() const;
  Index parameters() const;
  Matrix forward(const Matrix& inputs) const;
};

/// Neuron i of a layer as the point [W_i,:, b_i].
PointSet neuron_points(const LayerSpec& layer);

struct PruneOptions {
  InfCoresetOptions coreset;
  // Optional preprocessing of the neuron points before peeling.
  std::optional<ReductionMethod> reduction;
  Index target_dim = 0;
  std::uint64_t reduction_seed = 0;
  Index probes = 1000;
};

/// Elementwise max over next-layer neurons j of the sign-split sensitivities of
/// the scaled points { W_next(j, i) p_i }.
SensitivityMap neuron_sensitivities(const LayerSpec& layer, const LayerSpec& next,
                                    const PruneOptions& options = {});

struct PrunedPair {
  LayerSpec layer;
  LayerSpec next;
  std::vector<Index> kept;  // sorted
  std::vector<double> u;    // merged weight per kept neuron
};

/// Samples m neurons with probability s / t, merges duplicates by summing
/// u = t / (m s), keeps those rows and rescales the matching next-layer columns.
/// m >= layer width keeps every neuron with u = 1.
PrunedPair prune_layer(const LayerSpec& layer, const LayerSpec& next,
                       const SensitivityMap& sens, Index m, std::uint64_t seed);
PrunedPair prune_layer(const LayerSpec& layer, const LayerSpec& next, Index m,
                       std::uint64_t seed, const PruneOptions& options = {});

/// Relative error ||z' - z|| / ||z|| of next-layer pre-activations on standard
/// normal probes at the layer input.
ErrorStats pair_output_error(const LayerSpec& layer, const LayerSpec& next,
                             const PrunedPair& pruned, Index probes, std::uint64_t seed);

struct LayerReport {
  Index layer = 0;
  Index total = 0;
  std::vector<Index> kept;
  std::vector<double> u;
  double pr_percent = 0.0;  // parameters removed from this layer's own W and b
  double err_mean = 0.0;
  double err_max = 0.0;
};

struct PruneReport {
  std::vector<LayerReport> layers;
  Index params_before = 0;
  Index params_after = 0;
  double pr_percent = 0.0;
};

struct PrunedNetwork {
  NetworkSpec network;
  PruneReport report;
};

/// Prunes every layer except the output layer, first hidden layer first.
/// Budgets larger than a layer's width are clamped with a warning.
PrunedNetwork prune_network(const NetworkSpec& net, const std::vector<Index>& budgets,
                            std::uint64_t seed, const PruneOptions& options = {});

/// Parameter count of `net` with its hidden widths replaced by `widths`.
Index parameters_with_widths(const NetworkSpec& net, const std::vector<Index>& widths);

/// Per-layer widths scaled by a common keep fraction so that the parameter
/// count matches target_pr percent removal as closely as possible.
std::vector<Index> budgets_for_pruning_ratio(const NetworkSpec& net, double target_pr);

}  // namespace coreprune
