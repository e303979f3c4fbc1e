#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "json.hpp"
#include "pgvar/graph.hpp"
#include "pgvar/models.hpp"
#include "pgvar/product.hpp"
#include "pgvar/signal.hpp"

namespace pgvar {

enum class RandomGraphModel { random_geometric, erdos_renyi };

struct GraphSpec {
  RandomGraphModel model = RandomGraphModel::random_geometric;
  int n_nodes = 30;
  // Connection radius in the unit square (geometric) or edge probability (ER).
  double connectivity = 0.3;
  std::uint64_t seed = 1;
  bool normalize = true;
};

enum class FeatureTopology { complete, path, ring, edgeless, random };

struct FeatureGraphSpec {
  int n_features = 3;
  FeatureTopology topology = FeatureTopology::complete;
  std::uint64_t seed = 1;
  double edge_probability = 0.5;  // random topology only
  bool normalize = true;
};

struct SynthSpec {
  GraphSpec graph;
  FeatureGraphSpec feature_graph;
  Family family = Family::PGVAR;
  int lag_order = 2;
  int node_order = 2;
  int feature_order = 0;
  ProductKind product = ProductKind::cartesian;
  ChannelMode channels = ChannelMode::separate;
  double rho = 0.5;
  double noise_sigma = 1.0;
  int n_steps = 200;
  int burn_in = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

// Symmetric binary graphs, scaled to unit spectral norm when requested.
Graph random_graph(const GraphSpec& spec);
Graph make_feature_graph(const FeatureGraphSpec& spec);

ModelStructure synth_structure(const SynthSpec& spec);

// Uniform [-1, 1] draws rescaled so that sum |h| * (bound on the norm of the
// matching shift term) equals rho. With unit-norm S and S_F the bound is 1
// for GVAR and GPGVAR terms, so sum |h| = rho there; for PGVAR the k-th
// power of S_prod is bounded by (sum_ij |s_ij|)^k. VAR lag matrices are
// scaled so sum_p ||A_p||_2 = rho. Either way sum_p ||H_p|| <= rho < 1.
ModelParams gen_stable_coeffs(const ModelStructure& structure, double rho, std::uint64_t seed);
ModelParams gen_stable_coeffs(const SynthSpec& spec);

// Runs x_t = -sum_p H_p x_{t-p} + e_t, e_t ~ N(0, sigma^2 I), for
// burn_in + T steps and returns the last T. The P states before the first
// step are zero unless `initial_history` is given (initial_history[0] is the
// most recent one).
SignalSequence simulate(const ModelParams& m, int n_steps, double noise_sigma, int burn_in, std::uint64_t seed,
                        std::span<const Eigen::VectorXd> initial_history = {});

struct MeshSpec {
  int n_nodes = 100;
  int n_steps = 200;
  std::uint64_t seed = 1;
  double deformation_amplitude = 0.3;
  // Share the low-frequency deformation modes across coordinates.
  bool coupling = true;
  double coupling_strength = 0.9;
  double translation_speed = 0.002;
  double noise_sigma = 0.01;

  void validate() const;
};

struct MovingMesh {
  Eigen::MatrixXd points;  // first-frame coordinates, N x 3
  SignalSequence sequence;  // T x 3N, F = 3
};

// Random point cloud moved by a global translation plus a smooth
// sinusoidal deformation; with coupling on, every coordinate of a node
// follows a mix of the same per-node oscillations.
MovingMesh gen_moving_mesh(const MeshSpec& spec);

nlohmann::ordered_json to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const MeshSpec& spec);
MeshSpec mesh_spec_from_json(const nlohmann::ordered_json& j);

}  // namespace pgvar
