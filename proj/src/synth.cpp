#include "pgvar/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pgvar/error.hpp"

namespace pgvar {

void SynthSpec::validate() const {
  require(graph.n_nodes > 0 && feature_graph.n_features > 0, ErrorCode::invalid_parameter,
          "synthetic graphs need positive sizes");
  require(rho >= 0.0 && rho < 1.0, ErrorCode::invalid_parameter, "rho must lie in [0, 1)");
  require(noise_sigma >= 0.0, ErrorCode::invalid_parameter, "noise_sigma must be nonnegative");
  require(n_steps > 0 && burn_in >= 0, ErrorCode::invalid_parameter, "T must be positive, burn_in nonnegative");
  require(lag_order >= 1 && node_order >= 0 && feature_order >= 0, ErrorCode::invalid_parameter,
          "invalid model orders");
}

void MeshSpec::validate() const {
  require(n_nodes >= 12, ErrorCode::invalid_parameter, "moving mesh needs at least 12 points");
  require(n_steps > 0, ErrorCode::invalid_parameter, "moving mesh needs T > 0");
  require(deformation_amplitude >= 0.0 && noise_sigma >= 0.0, ErrorCode::invalid_parameter,
          "amplitudes must be nonnegative");
  require(coupling_strength >= 0.0 && coupling_strength <= 1.0, ErrorCode::invalid_parameter,
          "coupling_strength must lie in [0, 1]");
}

namespace {

Graph finish(Graph g, bool normalize) {
  if (normalize && g.edge_count() > 0) return normalize_shift(g);
  return g;
}

}  // namespace

Graph random_graph(const GraphSpec& spec) {
  require(spec.n_nodes > 0, ErrorCode::invalid_parameter, "random graph needs nodes");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = spec.n_nodes;
  std::vector<Edge> edges;
  if (spec.model == RandomGraphModel::random_geometric) {
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = unif(rng);
      ys[i] = unif(rng);
    }
    const double r2 = spec.connectivity * spec.connectivity;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && (xs[i] - xs[j]) * (xs[i] - xs[j]) + (ys[i] - ys[j]) * (ys[i] - ys[j]) <= r2)
          edges.push_back({i, j, 1.0});
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (unif(rng) < spec.connectivity) {
          edges.push_back({i, j, 1.0});
          edges.push_back({j, i, 1.0});
        }
  }
  return finish(Graph::from_edges(n, std::move(edges)), spec.normalize);
}

Graph make_feature_graph(const FeatureGraphSpec& spec) {
  const int f = spec.n_features;
  require(f > 0, ErrorCode::invalid_parameter, "feature graph needs features");
  Graph g;
  switch (spec.topology) {
    case FeatureTopology::complete: g = complete_graph(f); break;
    case FeatureTopology::path: g = path_graph(f); break;
    case FeatureTopology::ring: g = ring_graph(f); break;
    case FeatureTopology::edgeless: g = edgeless_graph(f); break;
    case FeatureTopology::random: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<Edge> edges;
      for (int i = 0; i < f; ++i)
        for (int j = i + 1; j < f; ++j)
          if (unif(rng) < spec.edge_probability) {
            edges.push_back({i, j, 1.0});
            edges.push_back({j, i, 1.0});
          }
      g = Graph::from_edges(f, std::move(edges));
      break;
    }
  }
  return finish(std::move(g), spec.normalize);
}

ModelStructure synth_structure(const SynthSpec& spec) {
  spec.validate();
  auto node = std::make_shared<const Graph>(random_graph(spec.graph));
  auto feature = std::make_shared<const Graph>(make_feature_graph(spec.feature_graph));
  const int n = spec.graph.n_nodes;
  const int f = spec.feature_graph.n_features;
  switch (spec.family) {
    case Family::VAR: return ModelStructure::var(n, f, spec.lag_order);
    case Family::GVAR: return ModelStructure::gvar(node, f, spec.lag_order, spec.node_order, spec.channels);
    case Family::PGVAR:
      return ModelStructure::pgvar(make_product(node, feature, spec.product), spec.lag_order, spec.node_order);
    case Family::GPGVAR:
      return ModelStructure::gpgvar(node, feature, spec.lag_order, spec.node_order, spec.feature_order);
  }
  fail(ErrorCode::invalid_parameter, "unknown family");
}

ModelParams gen_stable_coeffs(const ModelStructure& structure, double rho, std::uint64_t seed) {
  require(rho >= 0.0 && rho < 1.0, ErrorCode::invalid_parameter, "rho must lie in [0, 1)");
  auto m = ModelParams::zeros(structure);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto& s = m.structure;

  if (s.family == Family::VAR) {
    double total = 0.0;
    for (auto& a : m.var_lags) {
      for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = unif(rng);
      total += Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    }
    for (auto& a : m.var_lags) a *= total > 0.0 ? rho / total : 0.0;
    return m;
  }

  const double node_norm = s.node_graph && s.node_graph->edge_count() > 0 ? spectral_norm_estimate(*s.node_graph) : 0.0;
  const double feature_norm =
      s.feature_graph && s.feature_graph->edge_count() > 0 ? spectral_norm_estimate(*s.feature_graph) : 0.0;
  double product_norm = 0.0;
  if (s.family == Family::PGVAR)
    for (const auto& t : s.product->terms())
      product_norm += std::abs(t.weight) * std::pow(node_norm, t.node_power) * std::pow(feature_norm, t.feature_power);

  auto term_bound = [&](int k, int l) {
    switch (s.family) {
      case Family::GVAR: return std::pow(node_norm, k);
      case Family::PGVAR: return std::pow(product_norm, k);
      case Family::GPGVAR: return std::pow(node_norm, k) * std::pow(feature_norm, l);
      case Family::VAR: break;
    }
    return 1.0;
  };

  for (double& c : m.coeffs) c = unif(rng);
  for (int set = 0; set < s.coefficient_sets(); ++set) {
    double weighted = 0.0;
    for (int p = 1; p <= s.lag_order; ++p)
      for (int k = 0; k <= s.node_order; ++k)
        for (int l = 0; l <= s.feature_order; ++l) weighted += std::abs(m.coeff(p, k, l, set)) * term_bound(k, l);
    const double factor = weighted > 0.0 ? rho / weighted : 0.0;
    for (int p = 1; p <= s.lag_order; ++p)
      for (int k = 0; k <= s.node_order; ++k)
        for (int l = 0; l <= s.feature_order; ++l) m.coeff(p, k, l, set) *= factor;
  }
  return m;
}

ModelParams gen_stable_coeffs(const SynthSpec& spec) {
  return gen_stable_coeffs(synth_structure(spec), spec.rho, spec.seed);
}

SignalSequence simulate(const ModelParams& m, int n_steps, double noise_sigma, int burn_in, std::uint64_t seed,
                        std::span<const Eigen::VectorXd> initial_history) {
  m.validate();
  const auto& s = m.structure;
  require(n_steps > 0 && burn_in >= 0, ErrorCode::invalid_parameter, "T must be positive, burn_in nonnegative");
  require(noise_sigma >= 0.0, ErrorCode::invalid_parameter, "noise_sigma must be nonnegative");
  const int P = s.lag_order;
  const auto d = s.dimension();

  // history[0] = x_{t-1}
  std::vector<Eigen::VectorXd> history(P, Eigen::VectorXd::Zero(d));
  if (!initial_history.empty()) {
    require(static_cast<int>(initial_history.size()) >= P, ErrorCode::insufficient_data,
            "initial history needs P states");
    for (int p = 0; p < P; ++p) {
      require(initial_history[p].size() == d, ErrorCode::dimension_mismatch, "initial state has wrong length");
      history[p] = initial_history[p];
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  RowMatrix out(n_steps, d);
  const int total = burn_in + n_steps;
  for (int step = 0; step < total; ++step) {
    Eigen::VectorXd x = predict_one_step(m, history);
    if (noise_sigma > 0.0)
      for (Eigen::Index i = 0; i < d; ++i) x[i] += noise(rng);
    require(x.allFinite() && x.cwiseAbs().maxCoeff() < 1e150, ErrorCode::instability,
            "simulation diverged at step " + std::to_string(step));
    for (int p = P - 1; p > 0; --p) history[p].swap(history[p - 1]);
    history[0] = x;
    if (step >= burn_in) out.row(step - burn_in) = x.transpose();
  }
  return SignalSequence(s.n_nodes, s.n_features, std::move(out));
}

MovingMesh gen_moving_mesh(const MeshSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = spec.n_nodes;
  const int T = spec.n_steps;
  constexpr int F = 3;
  const Eigen::Vector3d body(1.5, 0.6, 0.8);

  Eigen::MatrixXd points(n, F);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d p;
    do {
      p = Eigen::Vector3d(unif(rng), unif(rng), unif(rng));
    } while (p.squaredNorm() > 1.0);
    points.row(i) = p.cwiseProduct(body).transpose();
  }

  // Three low-frequency modes; each has a spatially smooth phase field so
  // neighbouring points move alike.
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Eigen::Vector3d omega;
  Eigen::Matrix3d wave;  // column c: phase gradient of mode c
  for (int c = 0; c < F; ++c) {
    omega[c] = two_pi / (12.0 + 10.0 * (unif(rng) + 1.0));
    wave.col(c) = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)).normalized() * 1.2;
  }
  Eigen::Vector3d phase0(unif(rng) * std::numbers::pi, unif(rng) * std::numbers::pi, unif(rng) * std::numbers::pi);

  Eigen::Matrix3d mix = Eigen::Matrix3d::Identity();
  if (spec.coupling) {
    const double g = spec.coupling_strength;
    mix = (1.0 - g) * Eigen::Matrix3d::Identity() + (g / 3.0) * Eigen::Matrix3d::Ones();
  }
  const Eigen::Vector3d direction = Eigen::Vector3d(1.0, 0.25, 0.0).normalized();

  RowMatrix data(T, static_cast<Eigen::Index>(n) * F);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector3d p0 = points.row(i).transpose();
      Eigen::Vector3d modes;
      for (int c = 0; c < F; ++c) modes[c] = std::sin(omega[c] * t + phase0[c] + wave.col(c).dot(p0));
      Eigen::Vector3d x = p0 + spec.translation_speed * t * direction + spec.deformation_amplitude * (mix * modes);
      if (spec.noise_sigma > 0.0)
        for (int c = 0; c < F; ++c) x[c] += spec.noise_sigma * gauss(rng);
      data.block(t, static_cast<Eigen::Index>(i) * F, 1, F) = x.transpose();
    }
  }
  return {points, SignalSequence(n, F, std::move(data))};
}

namespace {

std::string to_string(RandomGraphModel m) { return m == RandomGraphModel::erdos_renyi ? "erdos_renyi" : "random_geometric"; }

RandomGraphModel parse_graph_model(const std::string& s) {
  if (s == "random_geometric") return RandomGraphModel::random_geometric;
  if (s == "erdos_renyi") return RandomGraphModel::erdos_renyi;
  fail(ErrorCode::invalid_parameter, "unknown graph model '" + s + "'");
}

std::string to_string(FeatureTopology t) {
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
  if (s == "random") return FeatureTopology::random;
  fail(ErrorCode::invalid_parameter, "unknown feature topology '" + s + "'");
}

template <class T>
void read_opt(const nlohmann::ordered_json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

}  // namespace

nlohmann::ordered_json to_json(const SynthSpec& spec) {
  nlohmann::ordered_json j;
  j["graph"] = {{"model", to_string(spec.graph.model)},
                {"n_nodes", spec.graph.n_nodes},
                {"connectivity", spec.graph.connectivity},
                {"seed", spec.graph.seed},
                {"normalize", spec.graph.normalize}};
  j["feature_graph"] = {{"n_features", spec.feature_graph.n_features},
                        {"topology", to_string(spec.feature_graph.topology)},
                        {"seed", spec.feature_graph.seed},
                        {"edge_probability", spec.feature_graph.edge_probability},
                        {"normalize", spec.feature_graph.normalize}};
  j["family"] = std::string(pgvar::to_string(spec.family));
  j["P"] = spec.lag_order;
  j["K"] = spec.node_order;
  j["L"] = spec.feature_order;
  j["product"] = std::string(pgvar::to_string(spec.product));
  j["channels"] = std::string(pgvar::to_string(spec.channels));
  j["rho"] = spec.rho;
  j["noise_sigma"] = spec.noise_sigma;
  j["T"] = spec.n_steps;
  j["burn_in"] = spec.burn_in;
  j["seed"] = spec.seed;
  return j;
}

SynthSpec synth_spec_from_json(const nlohmann::ordered_json& j) {
  SynthSpec s;
  try {
    if (j.contains("graph")) {
      const auto& g = j.at("graph");
      if (g.contains("model")) s.graph.model = parse_graph_model(g.at("model").get<std::string>());
      read_opt(g, "n_nodes", s.graph.n_nodes);
      read_opt(g, "connectivity", s.graph.connectivity);
      read_opt(g, "seed", s.graph.seed);
      read_opt(g, "normalize", s.graph.normalize);
    }
    if (j.contains("feature_graph")) {
      const auto& g = j.at("feature_graph");
      read_opt(g, "n_features", s.feature_graph.n_features);
      if (g.contains("topology")) s.feature_graph.topology = parse_topology(g.at("topology").get<std::string>());
      read_opt(g, "seed", s.feature_graph.seed);
      read_opt(g, "edge_probability", s.feature_graph.edge_probability);
      read_opt(g, "normalize", s.feature_graph.normalize);
    }
    if (j.contains("family")) s.family = parse_family(j.at("family").get<std::string>());
    read_opt(j, "P", s.lag_order);
    read_opt(j, "K", s.node_order);
    read_opt(j, "L", s.feature_order);
    if (j.contains("product")) s.product = parse_product_kind(j.at("product").get<std::string>());
    if (j.contains("channels")) s.channels = parse_channel_mode(j.at("channels").get<std::string>());
    read_opt(j, "rho", s.rho);
    read_opt(j, "noise_sigma", s.noise_sigma);
    read_opt(j, "T", s.n_steps);
    read_opt(j, "burn_in", s.burn_in);
    read_opt(j, "seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format_error, std::string("synth spec: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::ordered_json to_json(const MeshSpec& spec) {
  nlohmann::ordered_json j;
  j["n_nodes"] = spec.n_nodes;
  j["n_steps"] = spec.n_steps;
  j["seed"] = spec.seed;
  j["deformation_amplitude"] = spec.deformation_amplitude;
  j["coupling"] = spec.coupling;
  j["coupling_strength"] = spec.coupling_strength;
  j["translation_speed"] = spec.translation_speed;
  j["noise_sigma"] = spec.noise_sigma;
  return j;
}

MeshSpec mesh_spec_from_json(const nlohmann::ordered_json& j) {
  MeshSpec s;
  try {
    read_opt(j, "n_nodes", s.n_nodes);
    read_opt(j, "n_steps", s.n_steps);
    read_opt(j, "seed", s.seed);
    read_opt(j, "deformation_amplitude", s.deformation_amplitude);
    read_opt(j, "coupling", s.coupling);
    read_opt(j, "coupling_strength", s.coupling_strength);
    read_opt(j, "translation_speed", s.translation_speed);
    read_opt(j, "noise_sigma", s.noise_sigma);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format_error, std::string("mesh spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace pgvar
