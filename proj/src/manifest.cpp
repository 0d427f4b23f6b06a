#include "coreprune/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "coreprune/error.hpp"
#include "coreprune/npy.hpp"

namespace coreprune {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadManifest, path.string() + ": " + e.what());
  }
}

}  // namespace

NetworkManifest load_manifest(const fs::path& path) {
  const json doc = parse_file(path);
  const fs::path base = path.parent_path();
  NetworkManifest manifest;
  try {
    if (doc.contains("metadata")) {
      const json& meta = doc.at("metadata");
      manifest.metadata.name = meta.value("name", "");
      manifest.metadata.created = meta.value("created", "");
      manifest.metadata.seed = meta.value("seed", std::uint64_t{0});
    }
    for (const json& entry : doc.at("layers")) {
      LayerSpec layer;
      layer.W = npy::read_matrix(base / entry.at("weights").get<std::string>());
      layer.b = npy::read_vector(base / entry.at("bias").get<std::string>());
      layer.activation = activation_from_string(entry.value("activation", "relu"));
      manifest.network.layers.push_back(std::move(layer));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadManifest, path.string() + ": " + e.what());
  }
  manifest.network.validate();
  return manifest;
}

void save_manifest(const fs::path& path, const NetworkManifest& manifest) {
  manifest.network.validate();
  const fs::path base = path.parent_path();
  if (!base.empty()) fs::create_directories(base);
  const std::string stem = path.stem().string();

  json doc;
  doc["metadata"] = {{"name", manifest.metadata.name},
                     {"created", manifest.metadata.created},
                     {"seed", manifest.metadata.seed}};
  doc["layers"] = json::array();
  for (std::size_t k = 0; k < manifest.network.layers.size(); ++k) {
    const LayerSpec& layer = manifest.network.layers[k];
    const std::string weights = stem + "_layer" + std::to_string(k) + "_weights.npy";
    const std::string bias = stem + "_layer" + std::to_string(k) + "_bias.npy";
    npy::write_matrix(base / weights, layer.W);
    npy::write_vector(base / bias, layer.b);
    doc["layers"].push_back(
        {{"weights", weights}, {"bias", bias}, {"activation", std::string(to_string(layer.activation))}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json to_json(const PruneReport& report) {
  json layers = json::array();
  for (const LayerReport& l : report.layers) {
    layers.push_back({{"layer", l.layer},
                      {"total", l.total},
                      {"kept", l.kept},
                      {"u", l.u},
                      {"pr_percent", l.pr_percent},
                      {"err_mean", l.err_mean},
                      {"err_max", l.err_max}});
  }
  return {{"layers", layers},
          {"params_before", report.params_before},
          {"params_after", report.params_after},
          {"pr_percent", report.pr_percent}};
}

PruneReport report_from_json(const json& j) {
  PruneReport report;
  try {
    report.params_before = j.at("params_before").get<Index>();
    report.params_after = j.at("params_after").get<Index>();
    report.pr_percent = j.at("pr_percent").get<double>();
    for (const json& l : j.at("layers")) {
      LayerReport row;
      row.layer = l.at("layer").get<Index>();
      row.total = l.at("total").get<Index>();
      row.kept = l.at("kept").get<std::vector<Index>>();
      row.u = l.at("u").get<std::vector<double>>();
      row.pr_percent = l.at("pr_percent").get<double>();
      row.err_mean = l.at("err_mean").get<double>();
      row.err_max = l.at("err_max").get<double>();
      report.layers.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadManifest, std::string("prune report: ") + e.what());
  }
  return report;
}

std::string report_to_csv(const PruneReport& report) {
  std::ostringstream out;
  out << "layer,kept,total,pr_percent,err_mean,err_max\r\n";
  for (const LayerReport& l : report.layers) {
    out << l.layer << ',' << l.kept.size() << ',' << l.total << ',' << shortest(l.pr_percent) << ','
        << shortest(l.err_mean) << ',' << shortest(l.err_max) << "\r\n";
  }
  return out.str();
}

json to_json(const WeightedCoreset& coreset) {
  return {{"indices", coreset.indices}, {"u", coreset.u}, {"m", coreset.size()}};
}

WeightedCoreset coreset_from_json(const json& j) {
  WeightedCoreset out;
  try {
    out.indices = j.at("indices").get<std::vector<Index>>();
    out.u = j.at("u").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadManifest, std::string("coreset document: ") + e.what());
  }
  if (out.indices.size() != out.u.size())
    throw Error(ErrorKind::BadManifest, "coreset indices and u differ in length");
  return out;
}

}  // namespace coreprune
