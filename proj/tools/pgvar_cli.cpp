// pgvar: synth | fit | predict | evaluate | experiment
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pgvar/error.hpp"
#include "pgvar/eval.hpp"
#include "pgvar/experiment.hpp"
#include "pgvar/model_io.hpp"
#include "pgvar/synth.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace pgvar;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format_error, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io_error, "cannot open " + path.string() + " for writing");
  out << text;
}

bool on_off(const std::string& s) { return s == "on"; }

std::vector<std::string> kind_names() { return {"cartesian", "kronecker", "strong"}; }

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string kind = "pgvar";
  fs::path config;
  fs::path out = "synth_out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> family;
  std::optional<std::string> product;
  std::optional<std::string> normalize;
  std::optional<int> steps;
  std::optional<int> nodes;
  std::optional<int> features;
  std::optional<double> noise;
};

int run_synth(const SynthArgs& a) {
  fs::create_directories(a.out);
  if (a.kind == "mesh") {
    MeshSpec spec = a.config.empty() ? MeshSpec{} : mesh_spec_from_json(read_json(a.config));
    if (a.seed) spec.seed = *a.seed;
    if (a.steps) spec.n_steps = *a.steps;
    if (a.nodes) spec.n_nodes = *a.nodes;
    if (a.noise) spec.noise_sigma = *a.noise;
    spec.validate();
    auto mesh = gen_moving_mesh(spec);
    save_sequence(mesh.sequence, a.out / "sequence.csv");
    save_points(mesh.points, a.out / "points.csv");
    write_text(a.out / "spec.json", to_json(spec).dump(2) + "\n");
    std::cout << "wrote " << (a.out / "sequence.csv").string() << " (N=" << mesh.sequence.n_nodes()
              << ", F=3, T=" << mesh.sequence.n_steps() << ")\n";
    return 0;
  }

  SynthSpec spec = a.config.empty() ? SynthSpec{} : synth_spec_from_json(read_json(a.config));
  if (a.seed) {
    spec.seed = *a.seed;
    spec.graph.seed = *a.seed;
    spec.feature_graph.seed = *a.seed;
  }
  if (a.family) spec.family = parse_family(*a.family);
  if (a.product) spec.product = parse_product_kind(*a.product);
  if (a.normalize) spec.graph.normalize = spec.feature_graph.normalize = on_off(*a.normalize);
  if (a.steps) spec.n_steps = *a.steps;
  if (a.nodes) spec.graph.n_nodes = *a.nodes;
  if (a.features) spec.feature_graph.n_features = *a.features;
  if (a.noise) spec.noise_sigma = *a.noise;
  spec.validate();

  const auto model = gen_stable_coeffs(spec);
  const auto seq = simulate(model, spec.n_steps, spec.noise_sigma, spec.burn_in, spec.seed);
  save_sequence(seq, a.out / "sequence.csv");
  save_model({model, std::nullopt}, a.out / "generator.json");
  write_text(a.out / "spec.json", to_json(spec).dump(2) + "\n");
  std::cout << "wrote " << (a.out / "sequence.csv").string() << " (N=" << seq.n_nodes()
            << ", F=" << seq.n_features() << ", T=" << seq.n_steps() << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  fs::path data;
  int features = 1;
  fs::path graph;
  fs::path points;
  fs::path feature_graph;
  std::string feature_topology = "complete";
  int knn = 10;
  std::string weighting = "gaussian";
  std::string normalize = "on";
  std::string family = "PGVAR";
  std::string product = "cartesian";
  std::string channels = "separate";
  std::vector<int> lags{1, 2, 3};
  std::vector<int> node_orders{0, 1, 2};
  std::vector<int> feature_orders{0, 1};
  std::optional<double> ridge;
  double in_fraction = 0.7;
  double train_fraction = 0.7;
  bool raw = false;
  fs::path out = "model.json";
  fs::path report;
  fs::path progress;
};

FeatureTopology parse_topology(const std::string& s) {
  if (s == "complete") return FeatureTopology::complete;
  if (s == "path") return FeatureTopology::path;
  if (s == "ring") return FeatureTopology::ring;
  if (s == "edgeless") return FeatureTopology::edgeless;
  fail(ErrorCode::invalid_parameter, "unknown feature topology '" + s + "'");
}

int run_fit(const FitArgs& a) {
  SignalSequence raw = load_sequence(a.data, a.features);
  std::optional<PreprocessTransform> transform;
  SignalSequence seq = raw;
  if (!a.raw) {
    auto [s, t] = preprocess(raw);
    seq = std::move(s);
    transform = std::move(t);
  }

  const bool normalize = on_off(a.normalize);
  Graph node = [&] {
    if (!a.graph.empty()) return load_edge_list(a.graph, seq.n_nodes());
    require(!a.points.empty(), ErrorCode::invalid_parameter, "fit needs --graph or --points");
    return build_knn_graph(load_points(a.points), a.knn,
                           a.weighting == "binary" ? KnnWeighting::binary : KnnWeighting::gaussian);
  }();
  if (normalize) node = normalize_shift(node);
  Graph feature = [&] {
    if (!a.feature_graph.empty()) {
      Graph g = load_edge_list(a.feature_graph, seq.n_features());
      return normalize && g.edge_count() > 0 ? normalize_shift(g) : g;
    }
    FeatureGraphSpec fs;
    fs.n_features = seq.n_features();
    fs.topology = parse_topology(a.feature_topology);
    fs.normalize = normalize;
    return make_feature_graph(fs);
  }();

  FitConfig fc;
  fc.family = parse_family(a.family);
  fc.product = parse_product_kind(a.product);
  fc.channels = parse_channel_mode(a.channels);
  fc.lag_grid = a.lags;
  fc.node_grid = a.node_orders;
  fc.feature_grid = a.feature_orders;
  fc.ridge_lambda = a.ridge;
  fc.in_fraction = a.in_fraction;
  fc.train_fraction = a.train_fraction;

  GraphSet graphs{std::make_shared<const Graph>(std::move(node)), std::make_shared<const Graph>(std::move(feature))};
  std::ostringstream progress;
  FitReport report = grid_search(fc, seq, graphs, &progress);
  save_model({report.model, transform}, a.out);
  if (!a.report.empty()) write_text(a.report, to_json(report).dump(2) + "\n");
  if (!a.progress.empty()) write_text(a.progress, progress.str());
  std::cout << "selected P=" << report.lag_order << " K=" << report.node_order << " L=" << report.feature_order
            << " validation_rnmse=" << report.validation_rnmse << " test_rnmse=" << report.test_rnmse << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PredictArgs {
  fs::path model;
  fs::path data;
  fs::path out = "predictions.csv";
  std::optional<int> from;
  std::optional<int> to;
  bool recursive = false;
  bool original_units = false;
};

int run_predict(const PredictArgs& a) {
  const auto doc = load_model(a.model);
  const auto& s = doc.model.structure;
  SignalSequence seq = load_sequence(a.data, s.n_features);
  require(seq.n_nodes() == s.n_nodes, ErrorCode::dimension_mismatch,
          "data has " + std::to_string(seq.n_nodes()) + " nodes, model has " + std::to_string(s.n_nodes));
  if (doc.transform) seq = doc.transform->apply(seq);
  const int begin = a.from.value_or(s.lag_order);
  const int end = a.to.value_or(seq.n_steps());
  auto pred = rollout(doc.model, seq, begin, end, a.recursive ? RolloutMode::recursive : RolloutMode::teacher_forced);
  if (a.original_units && doc.transform) pred = doc.transform->invert(pred);
  std::vector<int> times;
  for (int t = begin; t < end; ++t) times.push_back(t);
  save_sequence(pred, times, a.out);
  std::cout << "wrote " << (end - begin) << " predictions to " << a.out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  fs::path pred;
  fs::path truth;
  int features = 1;
  fs::path model;  // optional; maps truth into the model's preprocessed space
  fs::path out;
};

int run_evaluate(const EvaluateArgs& a) {
  auto [pred, pred_times] = load_sequence_with_times(a.pred, a.features);
  auto [truth, truth_times] = load_sequence_with_times(a.truth, a.features);
  if (!a.model.empty()) {
    const auto doc = load_model(a.model);
    if (doc.transform) truth = doc.transform->apply(truth);
  }
  // Align on the t column: every predicted step must appear in the truth.
  RowMatrix matched(pred.n_steps(), truth.dimension());
  std::size_t cursor = 0;
  for (int r = 0; r < pred.n_steps(); ++r) {
    while (cursor < truth_times.size() && truth_times[cursor] < pred_times[r]) ++cursor;
    require(cursor < truth_times.size() && truth_times[cursor] == pred_times[r], ErrorCode::invalid_input,
            "truth has no row for t=" + std::to_string(pred_times[r]));
    matched.row(r) = truth.data().row(static_cast<Eigen::Index>(cursor));
  }
  const SignalSequence aligned(truth.n_nodes(), truth.n_features(), std::move(matched));
  const auto report = evaluate(pred, aligned);
  write_text(a.out, to_json(report).dump(2) + "\n");
  if (!a.out.empty()) std::cout << "rnmse=" << report.rnmse << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  fs::path config;
  fs::path out = "experiment_out";
  std::optional<std::uint64_t> seed;
  std::optional<double> in_fraction;
  std::optional<double> train_fraction;
  std::vector<std::string> families;
  std::optional<std::string> product;
  std::optional<int> knn;
  std::optional<std::string> normalize;
  bool original_units = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  json doc = a.config.empty() ? json::object() : read_json(a.config);
  if (a.seed) {
    doc["seed"] = *a.seed;
    if (doc.contains("data") && doc["data"].contains("mesh")) doc["data"]["mesh"]["seed"] = *a.seed;
  }
  auto config = experiment_config_from_json(doc, a.config.empty() ? fs::path{} : a.config.parent_path());
  if (a.in_fraction) config.in_fractions = {*a.in_fraction};
  if (a.train_fraction) config.train_fraction = *a.train_fraction;
  if (!a.families.empty()) {
    config.families.clear();
    for (const auto& f : a.families) config.families.push_back(parse_family(f));
  }
  if (a.product) config.product = parse_product_kind(*a.product);
  if (a.knn) config.knn = *a.knn;
  if (a.normalize) config.normalize = on_off(*a.normalize);
  if (a.original_units) config.original_units = true;

  const auto result = run_experiment(config, a.out);
  for (Family f : config.families)
    std::cout << to_string(f) << " mean test rNMSE " << result.mean_test_rnmse(f) << "\n";
  std::cout << "reports in " << a.out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Product-graph VAR forecasting"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate synthetic data");
  synth->add_option("--kind", sa.kind, "pgvar (model-driven) or mesh")->check(CLI::IsMember({"pgvar", "mesh"}));
  synth->add_option("--config", sa.config, "Spec JSON");
  synth->add_option("--out", sa.out, "Output directory");
  synth->add_option("--seed", sa.seed);
  synth->add_option("--family", sa.family)->check(CLI::IsMember({"VAR", "GVAR", "PGVAR", "GPGVAR"}));
  synth->add_option("--product", sa.product)->check(CLI::IsMember(kind_names()));
  synth->add_option("--normalize", sa.normalize)->check(CLI::IsMember({"on", "off"}));
  synth->add_option("--steps", sa.steps);
  synth->add_option("--nodes", sa.nodes);
  synth->add_option("--features", sa.features);
  synth->add_option("--noise", sa.noise);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Grid search, refit and write model JSON");
  fit->add_option("--data", fa.data, "Sequence CSV")->required();
  fit->add_option("--features", fa.features, "Features per node");
  fit->add_option("--graph", fa.graph, "Node graph edge list");
  fit->add_option("--points", fa.points, "Node coordinates for kNN");
  fit->add_option("--knn", fa.knn);
  fit->add_option("--weighting", fa.weighting)->check(CLI::IsMember({"gaussian", "binary"}));
  fit->add_option("--feature-graph", fa.feature_graph, "Feature graph edge list");
  fit->add_option("--feature-topology", fa.feature_topology)
      ->check(CLI::IsMember({"complete", "path", "ring", "edgeless"}));
  fit->add_option("--normalize", fa.normalize)->check(CLI::IsMember({"on", "off"}));
  fit->add_option("--family", fa.family)->check(CLI::IsMember({"VAR", "GVAR", "PGVAR", "GPGVAR"}));
  fit->add_option("--product", fa.product)->check(CLI::IsMember(kind_names()));
  fit->add_option("--channels", fa.channels)->check(CLI::IsMember({"separate", "shared"}));
  fit->add_option("--P", fa.lags)->delimiter(',');
  fit->add_option("--K", fa.node_orders)->delimiter(',');
  fit->add_option("--L", fa.feature_orders)->delimiter(',');
  fit->add_option("--ridge", fa.ridge);
  fit->add_option("--in-fraction", fa.in_fraction);
  fit->add_option("--train-fraction", fa.train_fraction);
  fit->add_flag("--raw", fa.raw, "Skip preprocessing");
  fit->add_option("--out", fa.out, "Model JSON path");
  fit->add_option("--report", fa.report, "FitReport JSON path");
  fit->add_option("--progress", fa.progress, "Grid log (JSON lines)");

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "One-step predictions from a model");
  predict->add_option("--model", pa.model)->required();
  predict->add_option("--data", pa.data)->required();
  predict->add_option("--out", pa.out);
  predict->add_option("--from", pa.from, "First predicted step (default P)");
  predict->add_option("--to", pa.to, "One past the last predicted step");
  predict->add_flag("--recursive", pa.recursive, "Feed predictions back as lags");
  predict->add_flag("--original-units", pa.original_units);

  EvaluateArgs ea;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against truth");
  evaluate_cmd->add_option("--pred", ea.pred)->required();
  evaluate_cmd->add_option("--truth", ea.truth)->required();
  evaluate_cmd->add_option("--features", ea.features);
  evaluate_cmd->add_option("--model", ea.model, "Apply this model's preprocessing to the truth");
  evaluate_cmd->add_option("--out", ea.out, "Report JSON path (stdout when omitted)");

  ExperimentArgs xa;
  auto* experiment = app.add_subcommand("experiment", "Run the forecasting protocol");
  experiment->add_option("--config", xa.config, "Experiment JSON");
  experiment->add_option("--out", xa.out, "Output directory");
  experiment->add_option("--seed", xa.seed);
  experiment->add_option("--in-fraction", xa.in_fraction);
  experiment->add_option("--train-fraction", xa.train_fraction);
  experiment->add_option("--family", xa.families)->check(CLI::IsMember({"VAR", "GVAR", "PGVAR", "GPGVAR"}));
  experiment->add_option("--product", xa.product)->check(CLI::IsMember(kind_names()));
  experiment->add_option("--knn", xa.knn);
  experiment->add_option("--normalize", xa.normalize)->check(CLI::IsMember({"on", "off"}));
  experiment->add_flag("--original-units", xa.original_units);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return run_synth(sa);
    if (*fit) return run_fit(fa);
    if (*predict) return run_predict(pa);
    if (*evaluate_cmd) return run_evaluate(ea);
    if (*experiment) return run_experiment_cmd(xa);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
