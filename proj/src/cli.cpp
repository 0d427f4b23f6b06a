#include "coreprune/cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coreprune/activation.hpp"
#include "coreprune/caratheodory.hpp"
#include "coreprune/error.hpp"
#include "coreprune/geometry.hpp"
#include "coreprune/linf_coreset.hpp"
#include "coreprune/log.hpp"
#include "coreprune/manifest.hpp"
#include "coreprune/npy.hpp"
#include "coreprune/pruning.hpp"
#include "coreprune/random.hpp"
#include "coreprune/sensitivity.hpp"

namespace coreprune {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "json";
};

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_std(m.row(i).transpose()));
  return rows;
}

void emit(const Common& common, const std::string& text, std::ostream& out) {
  if (common.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(common.output, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::Io, "cannot write " + common.output);
  file << text;
}

void emit(const Common& common, const json& doc, const std::string& csv, std::ostream& out) {
  emit(common, common.format == "csv" ? csv : doc.dump(2) + "\n", out);
}

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Seed for every random draw");
  cmd->add_option("--output", common.output, "Write the result to this file instead of stdout");
  cmd->add_option("--format", common.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

PointSet load_points(const std::string& path, const std::string& weights_path = "") {
  Matrix data = npy::read_matrix(path);
  if (weights_path.empty()) return PointSet(std::move(data));
  return PointSet(std::move(data), npy::read_vector(weights_path));
}

std::vector<Index> parse_budgets(const std::string& text) {
  std::vector<Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Index value = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw Error(ErrorKind::InvalidParameter, "bad budget '" + item + "'");
    out.push_back(value);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidParameter, "no budgets given");
  return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-independent coresets for pruning fully-connected layers", "coreprune"};
  app.require_subcommand(1);

  // mvee
  Common mvee_common;
  std::string mvee_input;
  double mvee_eps = kDefaultMveeEps;
  int mvee_iter = kDefaultMveeMaxIter;
  bool mvee_project = false;
  auto* mvee_cmd = app.add_subcommand("mvee", "Minimum-volume enclosing ellipsoid of the rows");
  mvee_cmd->add_option("array", mvee_input, "NPY matrix, one point per row")->required();
  mvee_cmd->add_option("--eps", mvee_eps, "Duality-gap tolerance");
  mvee_cmd->add_option("--max-iter", mvee_iter, "Iteration cap");
  mvee_cmd->add_flag("--project", mvee_project, "Project onto the affine hull first");
  add_common(mvee_cmd, mvee_common);

  // cara
  Common cara_common;
  std::string cara_input;
  std::string cara_target;
  auto* cara_cmd = app.add_subcommand("cara", "Caratheodory decomposition of a target point");
  cara_cmd->add_option("array", cara_input, "NPY matrix, one point per row")->required();
  cara_cmd->add_option("--target", cara_target, "NPY vector inside the hull")->required();
  add_common(cara_cmd, cara_common);

  // linf
  Common linf_common;
  std::string linf_input;
  int linf_trials = 100;
  Index linf_j = 1;
  auto* linf_cmd = app.add_subcommand("linf", "L-infinity coreset with ratio diagnostic");
  linf_cmd->add_option("array", linf_input, "NPY matrix, one point per row")->required();
  linf_cmd->add_option("--trials", linf_trials, "Random (X, v) trials");
  linf_cmd->add_option("--j", linf_j, "Columns of X");
  add_common(linf_cmd, linf_common);

  // coreset
  Common coreset_common;
  std::string coreset_input;
  std::string coreset_weights;
  Index coreset_m = 0;
  auto* coreset_cmd = app.add_subcommand("coreset", "Sensitivity-sampled weighted coreset");
  coreset_cmd->add_option("array", coreset_input, "NPY matrix, one point per row")->required();
  coreset_cmd->add_option("-m", coreset_m, "Sample size")->required();
  coreset_cmd->add_option("--weights", coreset_weights, "NPY vector of point weights (sign split)");
  add_common(coreset_cmd, coreset_common);

  // complexity
  Common cx_common;
  std::string cx_input;
  Index cx_queries = 100;
  int cx_refine = 30;
  bool cx_append = false;
  auto* cx_cmd = app.add_subcommand("complexity", "Lower bound on the regression complexity measure");
  cx_cmd->add_option("array", cx_input, "NPY matrix whose last column is 1")->required();
  cx_cmd->add_option("--queries", cx_queries, "Random queries");
  cx_cmd->add_option("--refine", cx_refine, "Golden-section steps on the bias coordinate");
  cx_cmd->add_flag("--append-bias", cx_append, "Append the constant 1 column");
  add_common(cx_cmd, cx_common);

  // eval
  Common eval_common;
  std::string eval_input;
  std::string eval_coreset;
  std::string eval_weights;
  std::string eval_activation = "relu";
  Index eval_queries = 1000;
  auto* eval_cmd = app.add_subcommand("eval", "Relative error of a coreset on random queries");
  eval_cmd->add_option("array", eval_input, "NPY matrix, one point per row")->required();
  eval_cmd->add_option("--coreset", eval_coreset, "Coreset JSON from the coreset command")->required();
  eval_cmd->add_option("--activation", eval_activation, "relu|hinge|logloss|softplus|abs");
  eval_cmd->add_option("--queries", eval_queries, "Standard normal queries");
  eval_cmd->add_option("--weights", eval_weights, "NPY vector of point weights");
  add_common(eval_cmd, eval_common);

  // prune
  Common prune_common;
  std::string prune_manifest;
  std::string prune_budgets;
  std::string prune_report;
  std::string prune_reduce;
  Index prune_dim = 0;
  Index prune_probes = 1000;
  auto* prune_cmd = app.add_subcommand("prune", "Prune neurons of a fully-connected network");
  prune_cmd->add_option("manifest", prune_manifest, "Network manifest JSON")->required();
  prune_cmd->add_option("--budgets", prune_budgets, "Comma-separated sample sizes per hidden layer")->required();
  prune_cmd->add_option("--report", prune_report, "Also write the report to this file");
  prune_cmd->add_option("--reduce", prune_reduce, "pca or gaussian preprocessing of neuron points")
      ->check(CLI::IsMember({"pca", "gaussian"}));
  prune_cmd->add_option("--dim", prune_dim, "Target dimension for --reduce");
  prune_cmd->add_option("--probes", prune_probes, "Gaussian probes for per-layer error");
  add_common(prune_cmd, prune_common);
  prune_cmd->get_option("--output")->description("Pruned manifest path (default <stem>_pruned.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*mvee_cmd) {
      PointSet points = load_points(mvee_input);
      if (mvee_project) points = project(points, rank_and_basis(points));
      const MveeResult fit = mvee_detailed(points, mvee_eps, mvee_iter);
      double max_m = 0.0;
      double mean_m = 0.0;
      for (Index i = 0; i < points.size(); ++i) {
        const double m = fit.ellipsoid.membership(points.row(i).transpose());
        max_m = std::max(max_m, m);
        mean_m += m;
      }
      mean_m /= static_cast<double>(points.size());
      json doc = {{"n", points.size()},
                  {"dim", points.dim()},
                  {"center", to_std(fit.ellipsoid.center())},
                  {"G", matrix_json(fit.ellipsoid.G())},
                  {"iterations", fit.iterations},
                  {"gap", fit.gap},
                  {"max_membership", max_m},
                  {"mean_membership", mean_m}};
      std::string csv = "row,center";
      for (Index k = 0; k < points.dim(); ++k) csv += ",g" + std::to_string(k);
      csv += "\r\n";
      for (Index i = 0; i < points.dim(); ++i) {
        csv += std::to_string(i) + "," + num(fit.ellipsoid.center()(i));
        for (Index k = 0; k < points.dim(); ++k) csv += "," + num(fit.ellipsoid.G()(i, k));
        csv += "\r\n";
      }
      emit(mvee_common, doc, csv, out);
    } else if (*cara_cmd) {
      const PointSet points = load_points(cara_input);
      const Vector target = npy::read_vector(cara_target);
      const ConvexDecomposition dec = cara(target, points);
      const double residual = (reconstruct(dec, points) - target).cwiseAbs().maxCoeff();
      json doc = {{"indices", dec.indices}, {"coefficients", dec.coefficients}, {"residual", residual}};
      std::string csv = "index,coefficient\r\n";
      for (std::size_t k = 0; k < dec.indices.size(); ++k)
        csv += std::to_string(dec.indices[k]) + "," + num(dec.coefficients[k]) + "\r\n";
      emit(cara_common, doc, csv, out);
    } else if (*linf_cmd) {
      const PointSet points = load_points(linf_input);
      const InfCoreset core = inf_coreset(points);
      const double r = static_cast<double>(std::max<Index>(core.rank, 1));
      json doc = {{"n", points.size()},
                  {"dim", points.dim()},
                  {"rank", core.rank},
                  {"indices", core.indices},
                  {"size", core.indices.size()},
                  {"size_bound", 2 * core.rank * (core.rank + 1)},
                  {"trials", linf_trials},
                  {"j", linf_j}};
      if (points.dim() >= 2 && points.size() >= 2) {
        doc["ratio_max"] = ratio_diagnostic(points, core.indices, linf_trials, linf_j, linf_common.seed);
        doc["ratio_bound"] = 2.0 * std::pow(r, 1.5);
      }
      std::string csv = "index\r\n";
      for (Index i : core.indices) csv += std::to_string(i) + "\r\n";
      emit(linf_common, doc, csv, out);
    } else if (*coreset_cmd) {
      const PointSet points = load_points(coreset_input, coreset_weights);
      WeightedCoreset core;
      double total = 0.0;
      if (points.has_weights()) {
        const SignedSensitivities sens = signed_sensitivities(points);
        core = sample_signed(points, sens, coreset_m, coreset_common.seed);
        total = sens.map.total;
      } else {
        const SensitivityMap sens = onion_sensitivities(points);
        core = sample_coreset(points, sens, coreset_m, coreset_common.seed);
        total = sens.total;
      }
      json doc = to_json(core);
      doc["seed"] = coreset_common.seed;
      doc["total_sensitivity"] = total;
      std::string csv = "index,u\r\n";
      for (std::size_t k = 0; k < core.indices.size(); ++k)
        csv += std::to_string(core.indices[k]) + "," + num(core.u[k]) + "\r\n";
      emit(coreset_common, doc, csv, out);
    } else if (*cx_cmd) {
      Matrix data = npy::read_matrix(cx_input);
      if (cx_append) {
        data.conservativeResize(Eigen::NoChange, data.cols() + 1);
        data.col(data.cols() - 1).setOnes();
      }
      const ComplexityEstimate est = complexity_estimate(PointSet(std::move(data)), cx_queries, cx_refine,
                                                         cx_common.seed);
      json doc = {{"mu_lower_bound", est.mu},
                  {"valid_queries", est.valid_queries},
                  {"skipped", est.skipped},
                  {"queries", cx_queries},
                  {"refine", cx_refine}};
      const std::string csv = "mu_lower_bound,valid_queries,skipped\r\n" + num(est.mu) + "," +
                              std::to_string(est.valid_queries) + "," + std::to_string(est.skipped) + "\r\n";
      emit(cx_common, doc, csv, out);
    } else if (*eval_cmd) {
      const PointSet points = load_points(eval_input, eval_weights);
      std::ifstream in(eval_coreset);
      if (!in) throw Error(ErrorKind::Io, "cannot open " + eval_coreset);
      json cj;
      try {
        cj = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorKind::BadManifest, eval_coreset + ": " + e.what());
      }
      const WeightedCoreset core = coreset_from_json(cj);
      const Activation kind = activation_from_string(eval_activation);
      if (eval_queries < 1) throw Error(ErrorKind::InvalidParameter, "--queries must be >= 1");
      Rng rng = make_rng(eval_common.seed);
      const Matrix queries = standard_normal(eval_queries, points.dim(), rng);
      const ErrorStats stats = coreset_rel_error(points, core, queries, kind);
      json doc = {{"activation", eval_activation},
                  {"max", stats.max},
                  {"mean", stats.mean},
                  {"evaluated", stats.evaluated},
                  {"skipped", stats.skipped}};
      const std::string csv = "activation,max,mean,evaluated,skipped\r\n" + eval_activation + "," +
                              num(stats.max) + "," + num(stats.mean) + "," + std::to_string(stats.evaluated) +
                              "," + std::to_string(stats.skipped) + "\r\n";
      emit(eval_common, doc, csv, out);
    } else if (*prune_cmd) {
      const fs::path manifest_path(prune_manifest);
      const NetworkManifest manifest = load_manifest(manifest_path);
      PruneOptions options;
      options.probes = prune_probes;
      options.reduction_seed = prune_common.seed;
      if (!prune_reduce.empty()) {
        if (prune_dim < 1) throw Error(ErrorKind::InvalidParameter, "--reduce needs --dim >= 1");
        options.reduction = prune_reduce == "pca" ? ReductionMethod::Pca : ReductionMethod::GaussianProjection;
        options.target_dim = prune_dim;
      }
      const PrunedNetwork pruned =
          prune_network(manifest.network, parse_budgets(prune_budgets), prune_common.seed, options);

      fs::path pruned_path = prune_common.output.empty()
                                 ? manifest_path.parent_path() / (manifest_path.stem().string() + "_pruned.json")
                                 : fs::path(prune_common.output);
      NetworkManifest result{pruned.network, manifest.metadata};
      result.metadata.name = manifest.metadata.name.empty() ? "pruned" : manifest.metadata.name + "-pruned";
      result.metadata.seed = prune_common.seed;
      save_manifest(pruned_path, result);

      json doc = to_json(pruned.report);
      doc["manifest"] = pruned_path.string();
      const std::string text =
          prune_common.format == "csv" ? report_to_csv(pruned.report) : doc.dump(2) + "\n";
      if (!prune_report.empty()) {
        std::ofstream file(prune_report, std::ios::binary | std::ios::trunc);
        if (!file) throw Error(ErrorKind::Io, "cannot write " + prune_report);
        file << text;
      }
      out << text;
    }
  } catch (const Error& e) {
    err << "coreprune: " << e.what() << '\n';
    return is_numerical(e.kind()) ? 3 : 2;
  } catch (const fs::filesystem_error& e) {
    err << "coreprune: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "coreprune: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace coreprune
