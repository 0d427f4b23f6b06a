#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "coreprune/pruning.hpp"
#include "coreprune/sensitivity.hpp"

namespace coreprune {

struct ManifestMetadata {
  std::string name;
  std::string created;
  std::uint64_t seed = 0;
};

struct NetworkManifest {
  NetworkSpec network;
  ManifestMetadata metadata;
};

/// Array paths are resolved relative to the manifest's directory.
NetworkManifest load_manifest(const std::filesystem::path& path);

/// Writes <stem>_layer<k>_weights.npy / _bias.npy next to the manifest.
void save_manifest(const std::filesystem::path& path, const NetworkManifest& manifest);

nlohmann::json to_json(const PruneReport& report);
PruneReport report_from_json(const nlohmann::json& j);
// Columns: layer,kept,total,pr_percent,err_mean,err_max
std::string report_to_csv(const PruneReport& report);

nlohmann::json to_json(const WeightedCoreset& coreset);
WeightedCoreset coreset_from_json(const nlohmann::json& j);

}  // namespace coreprune
