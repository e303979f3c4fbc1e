#include "pgvar/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "csv.hpp"
#include "pgvar/error.hpp"
#include "pgvar/eval.hpp"
#include "pgvar/signal.hpp"

namespace pgvar {

void ExperimentConfig::validate() const {
  require(!in_fractions.empty(), ErrorCode::invalid_parameter, "experiment needs at least one in-sample fraction");
  require(!families.empty(), ErrorCode::invalid_parameter, "experiment needs at least one family");
  require(knn > 0, ErrorCode::invalid_parameter, "knn must be positive");
  require(n_features > 0, ErrorCode::invalid_parameter, "n_features must be positive");
  if (source == Source::files) {
    require(!sequence_path.empty(), ErrorCode::invalid_parameter, "file experiments need data.sequence");
    require(!points_path.empty() || !graph_path.empty(), ErrorCode::invalid_parameter,
            "file experiments need data.points or data.graph");
  }
}

namespace {

using json = nlohmann::ordered_json;

std::string weighting_name(KnnWeighting w) { return w == KnnWeighting::binary ? "binary" : "gaussian"; }

KnnWeighting parse_weighting(const std::string& s) {
  if (s == "binary") return KnnWeighting::binary;
  if (s == "gaussian") return KnnWeighting::gaussian;
  fail(ErrorCode::invalid_parameter, "unknown kNN weighting '" + s + "'");
}

std::string topology_name(FeatureTopology t) {
  switch (t) {
    case FeatureTopology::complete: return "complete";
    case FeatureTopology::path: return "path";
    case FeatureTopology::ring: return "ring";
    case FeatureTopology::edgeless: return "edgeless";
    case FeatureTopology::random: return "random";
  }
  return "complete";
}

FeatureTopology parse_topology(const std::string& s) {
  if (s == "complete") return FeatureTopology::complete;
  if (s == "path") return FeatureTopology::path;
  if (s == "ring") return FeatureTopology::ring;
  if (s == "edgeless") return FeatureTopology::edgeless;
  fail(ErrorCode::invalid_parameter, "unsupported experiment feature topology '" + s + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

// Fixed two-decimal label, e.g. 0.50 -> "0.50".
std::string fraction_label(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", f);
  return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = csv::open_out(tmp);
    out << text;
    require(out.good(), ErrorCode::io_error, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.mesh.seed = c.seed;
    if (j.contains("data")) {
      const auto& d = j.at("data");
      const auto kind = d.value("kind", std::string("synthetic_mesh"));
      if (kind == "synthetic_mesh") {
        c.source = ExperimentConfig::Source::synthetic_mesh;
        json mesh = d.contains("mesh") ? d.at("mesh") : json::object();
        if (!mesh.contains("seed")) mesh["seed"] = c.seed;
        c.mesh = mesh_spec_from_json(mesh);
      } else if (kind == "files") {
        c.source = ExperimentConfig::Source::files;
        c.sequence_path = resolve(base_dir, d.at("sequence").get<std::string>());
        if (d.contains("points")) c.points_path = resolve(base_dir, d.at("points").get<std::string>());
        if (d.contains("graph")) c.graph_path = resolve(base_dir, d.at("graph").get<std::string>());
        c.n_features = d.value("n_features", 3);
      } else {
        fail(ErrorCode::invalid_parameter, "unknown data kind '" + kind + "'");
      }
    }
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      c.knn = g.value("knn", c.knn);
      if (g.contains("weighting")) c.weighting = parse_weighting(g.at("weighting").get<std::string>());
      c.normalize = g.value("normalize", c.normalize);
      if (g.contains("feature_graph")) c.feature_topology = parse_topology(g.at("feature_graph").get<std::string>());
    }
    if (j.contains("product")) c.product = parse_product_kind(j.at("product").get<std::string>());
    if (j.contains("in_fractions")) c.in_fractions = j.at("in_fractions").get<std::vector<double>>();
    if (j.contains("train_fraction")) c.train_fraction = j.at("train_fraction").get<double>();
    if (j.contains("families")) {
      c.families.clear();
      for (const auto& f : j.at("families")) c.families.push_back(parse_family(f.get<std::string>()));
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("P")) c.lag_grid = g.at("P").get<std::vector<int>>();
      if (g.contains("K")) c.node_grid = g.at("K").get<std::vector<int>>();
      if (g.contains("L")) c.feature_grid = g.at("L").get<std::vector<int>>();
    }
    if (j.contains("ridge_lambda") && !j.at("ridge_lambda").is_null())
      c.ridge_lambda = j.at("ridge_lambda").get<double>();
    if (j.contains("gvar_channels")) c.gvar_channels = parse_channel_mode(j.at("gvar_channels").get<std::string>());
    c.original_units = j.value("original_units", c.original_units);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format_error, std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  json data;
  if (c.source == ExperimentConfig::Source::synthetic_mesh) {
    data["kind"] = "synthetic_mesh";
    data["mesh"] = to_json(c.mesh);
  } else {
    data["kind"] = "files";
    data["sequence"] = c.sequence_path.string();
    data["points"] = c.points_path.string();
    data["graph"] = c.graph_path.string();
    data["n_features"] = c.n_features;
  }
  j["data"] = data;
  j["graph"] = {{"knn", c.knn},
                {"weighting", weighting_name(c.weighting)},
                {"normalize", c.normalize},
                {"feature_graph", topology_name(c.feature_topology)}};
  j["product"] = std::string(to_string(c.product));
  j["in_fractions"] = c.in_fractions;
  j["train_fraction"] = c.train_fraction;
  auto fams = json::array();
  for (auto f : c.families) fams.push_back(std::string(to_string(f)));
  j["families"] = fams;
  j["grid"] = {{"P", c.lag_grid}, {"K", c.node_grid}, {"L", c.feature_grid}};
  j["ridge_lambda"] = c.ridge_lambda ? json(*c.ridge_lambda) : json(nullptr);
  j["gvar_channels"] = std::string(to_string(c.gvar_channels));
  j["original_units"] = c.original_units;
  return j;
}

double ExperimentResult::mean_test_rnmse(Family family) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& cell : cells) {
    if (cell.family != family) continue;
    sum += cell.eval.rnmse;
    ++count;
  }
  require(count > 0, ErrorCode::invalid_parameter, "no cells for family " + std::string(to_string(family)));
  return sum / count;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  config.validate();

  SignalSequence raw;
  Eigen::MatrixXd points;
  try {
    if (config.source == ExperimentConfig::Source::synthetic_mesh) {
      auto mesh = gen_moving_mesh(config.mesh);
      raw = std::move(mesh.sequence);
      points = std::move(mesh.points);
    } else {
      raw = load_sequence(config.sequence_path, config.n_features);
      if (!config.points_path.empty()) points = load_points(config.points_path);
    }
  } catch (const Error& e) {
    fail(e.code(), std::string("experiment data stage: ") + e.what());
  }

  auto [seq, transform] = [&] {
    try {
      return preprocess(raw);
    } catch (const Error& e) {
      fail(e.code(), std::string("experiment preprocessing stage: ") + e.what());
    }
  }();

  GraphSet graphs;
  try {
    Graph node = config.graph_path.empty() ? build_knn_graph(points, config.knn, config.weighting)
                                           : load_edge_list(config.graph_path, seq.n_nodes());
    require(node.n_nodes() == seq.n_nodes(), ErrorCode::dimension_mismatch,
            "graph has " + std::to_string(node.n_nodes()) + " nodes, data has " + std::to_string(seq.n_nodes()));
    FeatureGraphSpec fspec;
    fspec.n_features = seq.n_features();
    fspec.topology = config.feature_topology;
    fspec.normalize = config.normalize;
    if (config.normalize) node = normalize_shift(node);
    graphs.node = std::make_shared<const Graph>(std::move(node));
    graphs.feature = std::make_shared<const Graph>(make_feature_graph(fspec));
  } catch (const Error& e) {
    fail(e.code(), std::string("experiment graph stage: ") + e.what());
  }

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  for (double fraction : config.in_fractions) {
    for (Family family : config.families) {
      FitConfig fc;
      fc.family = family;
      fc.lag_grid = config.lag_grid;
      fc.node_grid = config.node_grid;
      fc.feature_grid = config.feature_grid;
      fc.ridge_lambda = config.ridge_lambda;
      fc.in_fraction = fraction;
      fc.train_fraction = config.train_fraction;
      fc.product = config.product;
      fc.channels = config.gvar_channels;

      const std::string cell_name = std::string(to_string(family)) + "_in" + fraction_label(fraction);
      std::ostringstream progress;
      ExperimentCell cell;
      cell.in_fraction = fraction;
      cell.family = family;
      try {
        cell.fit = grid_search(fc, seq, graphs, &progress);
        const auto& test = cell.fit.split.test;
        auto pred = rollout(cell.fit.model, seq, test.begin, test.end);
        auto truth = seq.slice(test.begin, test.end);
        if (config.original_units) {
          pred = transform.invert(pred);
          truth = transform.invert(truth);
        }
        cell.eval = evaluate(pred, truth);
      } catch (const Error& e) {
        fail(e.code(), "experiment cell " + cell_name + ": " + e.what());
      }

      if (!out_dir.empty()) {
        json report;
        report["in_fraction"] = fraction;
        report["family"] = std::string(to_string(family));
        report["fit"] = to_json(cell.fit);
        report["eval"] = to_json(cell.eval);
        write_atomically(out_dir / (cell_name + ".json"), report.dump(2) + "\n");
        write_atomically(out_dir / (cell_name + ".grid.jsonl"), progress.str());
      }
      result.cells.push_back(std::move(cell));
    }
  }

  if (!out_dir.empty()) {
    std::string csv_text = "in_fraction,family,test_rnmse\n";
    for (const auto& cell : result.cells) {
      csv_text += fraction_label(cell.in_fraction) + "," + std::string(to_string(cell.family)) + ",";
      csv::append_double(csv_text, cell.eval.rnmse);
      csv_text += "\n";
    }
    write_atomically(out_dir / "comparison.csv", csv_text);

    json summary;
    summary["config"] = to_json(config);
    summary["n_nodes"] = seq.n_nodes();
    summary["n_features"] = seq.n_features();
    summary["n_steps"] = seq.n_steps();
    summary["node_graph_edges"] = graphs.node->edge_count();
    summary["feature_graph_edges"] = graphs.feature->edge_count();
    json means;
    for (Family f : config.families) means[std::string(to_string(f))] = result.mean_test_rnmse(f);
    summary["mean_test_rnmse"] = means;
    write_atomically(out_dir / "summary.json", summary.dump(2) + "\n");
  }
  return result;
}

}  // namespace pgvar
