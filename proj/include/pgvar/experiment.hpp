#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "pgvar/estimation.hpp"
#include "pgvar/graph.hpp"
#include "pgvar/metrics.hpp"
#include "pgvar/synth.hpp"

namespace pgvar {

// Forecasting protocol: load or generate data, preprocess, build the node
// and feature graphs, then for every (in-sample fraction, family) cell run
// a grid search and score one-step teacher-forced predictions on the test
// segment. See README for the JSON schema.
struct ExperimentConfig {
  std::uint64_t seed = 1;

  enum class Source { synthetic_mesh, files };
  Source source = Source::synthetic_mesh;
  MeshSpec mesh;
  std::filesystem::path sequence_path;
  std::filesystem::path points_path;
  std::filesystem::path graph_path;  // overrides kNN construction when set
  int n_features = 3;

  int knn = 10;
  KnnWeighting weighting = KnnWeighting::gaussian;
  bool normalize = true;
  FeatureTopology feature_topology = FeatureTopology::complete;
  ProductKind product = ProductKind::cartesian;

  std::vector<double> in_fractions{0.5, 0.6, 0.7, 0.8, 0.9};
  double train_fraction = 0.7;
  std::vector<Family> families{Family::GVAR, Family::PGVAR};
  std::vector<int> lag_grid{1, 2, 3};
  std::vector<int> node_grid{0, 1, 2};
  std::vector<int> feature_grid{0, 1};
  std::optional<double> ridge_lambda;
  ChannelMode gvar_channels = ChannelMode::separate;
  bool original_units = false;

  void validate() const;
};

// Relative paths in the document resolve against `base_dir`.
ExperimentConfig experiment_config_from_json(const nlohmann::ordered_json& j,
                                             const std::filesystem::path& base_dir = {});
nlohmann::ordered_json to_json(const ExperimentConfig& config);

struct ExperimentCell {
  double in_fraction = 0.0;
  Family family = Family::PGVAR;
  FitReport fit;
  EvalReport eval;
};

struct ExperimentResult {
  std::vector<ExperimentCell> cells;

  // Mean evaluated test rNMSE of one family over all in-sample fractions
  // (original units when the config asks for them).
  double mean_test_rnmse(Family family) const;
};

// When out_dir is non-empty, writes comparison.csv (in_fraction,family,test_rnmse),
// one report JSON and one grid log per cell, and summary.json.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir = {});

}  // namespace pgvar
