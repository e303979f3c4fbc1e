#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "../support/dense_oracle.hpp"
#include "pgvar/error.hpp"
#include "pgvar/model_io.hpp"
#include "pgvar/synth.hpp"

using namespace pgvar;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "pgvar_unit_models";
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<ModelParams> every_family() {
  std::mt19937_64 rng(1);
  auto g = oracle::graph_of(oracle::random_adjacency(rng, 5, 0.5, false));
  auto f = oracle::graph_of(oracle::random_adjacency(rng, 3, 0.7, true));
  std::vector<ModelStructure> structures{
      ModelStructure::var(2, 2, 2),
      ModelStructure::gvar(g, 3, 2, 2, ChannelMode::separate),
      ModelStructure::gvar(g, 3, 1, 1, ChannelMode::shared),
      ModelStructure::pgvar(make_product(g, f, ProductKind::cartesian), 3, 2),
      ModelStructure::pgvar(make_product(g, f, ProductKind::custom, {{1, 1, 0.5}, {0, 1, -2.0}}), 1, 2),
      ModelStructure::gpgvar(g, f, 2, 1, 2)};
  std::vector<ModelParams> out;
  std::uint64_t seed = 3;
  for (const auto& s : structures) out.push_back(gen_stable_coeffs(s, 0.7, seed++));
  // Awkward values for the text round trip.
  out[3].coeffs[0] = 1.0 / 3.0;
  out[3].coeffs[1] = -1e-300;
  return out;
}

}  // namespace

TEST(ModelIo, RoundTripsEveryFamilyBitwise) {
  const auto dir = temp_dir();
  int n = 0;
  for (const auto& m : every_family()) {
    const auto path = dir / ("model" + std::to_string(n++) + ".json");
    PreprocessTransform tr{Eigen::VectorXd::LinSpaced(m.structure.dimension(), -1.0, 2.0), 3.5};
    save_model({m, tr}, path);
    auto back = load_model(path);
    const auto& s = back.model.structure;
    EXPECT_EQ(s.family, m.structure.family);
    EXPECT_EQ(s.lag_order, m.structure.lag_order);
    EXPECT_EQ(s.node_order, m.structure.node_order);
    EXPECT_EQ(s.feature_order, m.structure.feature_order);
    EXPECT_EQ(s.channels, m.structure.channels);
    EXPECT_EQ(back.model.coeffs, m.coeffs);
    ASSERT_EQ(back.model.var_lags.size(), m.var_lags.size());
    for (std::size_t p = 0; p < m.var_lags.size(); ++p) EXPECT_EQ(back.model.var_lags[p], m.var_lags[p]);
    if (m.structure.node_graph) EXPECT_EQ(s.node_graph->edges(), m.structure.node_graph->edges());
    if (m.structure.product) {
      EXPECT_EQ(s.product->kind(), m.structure.product->kind());
      EXPECT_EQ(s.product->terms(), m.structure.product->terms());
    }
    ASSERT_TRUE(back.transform.has_value());
    EXPECT_EQ(back.transform->mean, tr.mean);
    EXPECT_EQ(back.transform->scale, 3.5);

    std::mt19937_64 rng(n);
    std::vector<Eigen::VectorXd> h;
    for (int p = 0; p < m.structure.lag_order; ++p) h.push_back(oracle::random_vector(rng, m.structure.dimension()));
    EXPECT_EQ(predict_one_step(back.model, h), predict_one_step(m, h));
  }
}

TEST(ModelIo, CoefficientLayout) {
  auto models = every_family();
  auto gvar = coeffs_to_json(models[1]);
  ASSERT_EQ(gvar.size(), 3u);     // sets
  ASSERT_EQ(gvar[0].size(), 2u);  // P
  ASSERT_EQ(gvar[0][0].size(), 3u);
  EXPECT_EQ(gvar[2][1][0].get<double>(), models[1].coeff(2, 0, 0, 2));
  auto gp = coeffs_to_json(models[5]);
  EXPECT_EQ(gp[1][1][2].get<double>(), models[5].coeff(2, 1, 2));
  auto var = coeffs_to_json(models[0]);
  EXPECT_EQ(var[1][3][0].get<double>(), models[0].var_lags[1](3, 0));
}

TEST(ModelIo, MissingTransformIsNull) {
  auto m = every_family()[4];
  const auto path = temp_dir() / "no_transform.json";
  save_model({m, std::nullopt}, path);
  EXPECT_FALSE(load_model(path).transform.has_value());
}

TEST(ModelIo, Errors) {
  const auto dir = temp_dir();
  EXPECT_THROW(load_model(dir / "absent.json"), Error);
  std::ofstream(dir / "broken.json") << "{ not json";
  try {
    load_model(dir / "broken.json");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::format_error);
  }
  auto m = every_family()[3];
  save_model({m, std::nullopt}, dir / "short.json");
  auto j = nlohmann::ordered_json::parse(std::ifstream(dir / "short.json"));
  j["coeffs"][0].erase(0);
  std::ofstream(dir / "short.json", std::ios::trunc) << j.dump();
  EXPECT_THROW(load_model(dir / "short.json"), Error);
}
