#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pgvar/error.hpp"
#include "pgvar/experiment.hpp"

using namespace pgvar;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / "pgvar_unit_experiment" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.mesh.n_nodes = 20;
  c.mesh.n_steps = 60;
  c.knn = 5;
  c.lag_grid = {1, 2};
  c.node_grid = {0, 1};
  return c;
}

}  // namespace

TEST(Experiment, SweepWritesFiveRowsPerFamily) {
  auto dir = fresh_dir("sweep");
  auto result = run_experiment(small_config(), dir);
  ASSERT_EQ(result.cells.size(), 10u);
  std::istringstream csv(read_file(dir / "comparison.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "in_fraction,family,test_rnmse");
  int gvar = 0, pgvar = 0;
  while (std::getline(csv, line)) {
    if (line.find(",GVAR,") != std::string::npos) ++gvar;
    if (line.find(",PGVAR,") != std::string::npos) ++pgvar;
  }
  EXPECT_EQ(gvar, 5);
  EXPECT_EQ(pgvar, 5);
  EXPECT_TRUE(fs::exists(dir / "PGVAR_in0.50.json"));
  EXPECT_TRUE(fs::exists(dir / "GVAR_in0.90.grid.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
  for (const auto& cell : result.cells) {
    EXPECT_EQ(cell.eval.rnmse, cell.fit.test_rnmse);
    EXPECT_EQ(cell.eval.steps, cell.fit.split.test.size());
    EXPECT_EQ(cell.eval.per_feature_rnmse.size(), 3u);
  }
  auto summary = nlohmann::ordered_json::parse(read_file(dir / "summary.json"));
  EXPECT_EQ(summary["mean_test_rnmse"]["PGVAR"].get<double>(), result.mean_test_rnmse(Family::PGVAR));
}

TEST(Experiment, RerunsAreByteIdentical) {
  auto a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
  auto cfg = small_config();
  cfg.in_fractions = {0.6, 0.8};
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(read_file(entry.path()), read_file(b / entry.path().filename())) << entry.path();
  }
  EXPECT_EQ(files, 2 * 2 * 2 + 2);
}

TEST(Experiment, SingleFamilySingleTuple) {
  auto dir = fresh_dir("single");
  auto cfg = small_config();
  cfg.families = {Family::PGVAR};
  cfg.in_fractions = {0.7};
  cfg.lag_grid = {1};
  cfg.node_grid = {1};
  auto result = run_experiment(cfg, dir);
  ASSERT_EQ(result.cells.size(), 1u);
  auto report = nlohmann::ordered_json::parse(read_file(dir / "PGVAR_in0.70.json"));
  EXPECT_EQ(report["fit"]["selected"]["P"], 1);
  EXPECT_EQ(report["fit"]["grid"].size(), 1u);
  EXPECT_TRUE(report["eval"]["rnmse"].is_number());
  EXPECT_THROW(result.mean_test_rnmse(Family::GVAR), Error);
}

TEST(Experiment, FileSourceMatchesSyntheticMesh) {
  auto dir = fresh_dir("files");
  auto cfg = small_config();
  cfg.in_fractions = {0.8};
  auto mesh = gen_moving_mesh(cfg.mesh);
  save_sequence(mesh.sequence, dir / "seq.csv");
  save_points(mesh.points, dir / "points.csv");
  nlohmann::ordered_json j = to_json(cfg);
  j["data"] = {{"kind", "files"}, {"sequence", "seq.csv"}, {"points", "points.csv"}, {"n_features", 3}};
  auto from_files = experiment_config_from_json(j, dir);
  EXPECT_EQ(from_files.sequence_path, dir / "seq.csv");
  auto a = run_experiment(cfg);
  auto b = run_experiment(from_files);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].fit.model.coeffs, b.cells[i].fit.model.coeffs);
    EXPECT_EQ(a.cells[i].eval.rnmse, b.cells[i].eval.rnmse);
  }

  // An explicit edge list replaces the kNN graph.
  save_edge_list(build_knn_graph(mesh.points, cfg.knn, cfg.weighting), dir / "graph.csv");
  j["data"] = {{"kind", "files"}, {"sequence", "seq.csv"}, {"graph", "graph.csv"}, {"n_features", 3}};
  auto c = run_experiment(experiment_config_from_json(j, dir));
  EXPECT_EQ(c.cells[1].eval.rnmse, a.cells[1].eval.rnmse);
}

TEST(Experiment, OriginalUnitsChangesTheScore) {
  auto cfg = small_config();
  cfg.in_fractions = {0.8};
  cfg.families = {Family::GVAR};
  const double scaled = run_experiment(cfg).mean_test_rnmse(Family::GVAR);
  cfg.original_units = true;
  auto r = run_experiment(cfg);
  EXPECT_NE(r.mean_test_rnmse(Family::GVAR), scaled);
  EXPECT_EQ(r.cells[0].fit.test_rnmse, scaled);
}

TEST(ExperimentConfig, JsonRoundTrip) {
  auto cfg = small_config();
  cfg.product = ProductKind::strong;
  cfg.families = {Family::GVAR, Family::PGVAR, Family::GPGVAR};
  cfg.ridge_lambda = 1e-4;
  cfg.feature_topology = FeatureTopology::path;
  auto back = experiment_config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(back), to_json(cfg));
  EXPECT_EQ(back.mesh.n_nodes, 20);
}

TEST(ExperimentConfig, Errors) {
  auto code = [](const nlohmann::ordered_json& j) {
    try {
      experiment_config_from_json(j).validate();
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << j.dump();
    return ErrorCode::io_error;
  };
  EXPECT_EQ(code({{"families", {"ARMA"}}}), ErrorCode::invalid_parameter);
  EXPECT_EQ(code({{"in_fractions", nlohmann::ordered_json::array()}}), ErrorCode::invalid_parameter);
  EXPECT_EQ(code({{"data", {{"kind", "files"}}}}), ErrorCode::format_error);
  EXPECT_EQ(code({{"data", {{"kind", "video"}}}}), ErrorCode::invalid_parameter);
  EXPECT_EQ(code({{"graph", {{"knn", "ten"}}}}), ErrorCode::format_error);
  EXPECT_EQ(code({{"graph", {{"knn", 0}}}}), ErrorCode::invalid_parameter);

  auto cfg = small_config();
  cfg.mesh.n_nodes = 3;
  try {
    run_experiment(cfg);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("data stage"), std::string::npos) << e.what();
  }
}
