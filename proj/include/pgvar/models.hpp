#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pgvar/exec.hpp"
#include "pgvar/graph.hpp"
#include "pgvar/product.hpp"
#include "pgvar/signal.hpp"

namespace pgvar {

// VAR: dense lag matrices. GVAR: filters in S. PGVAR: filters in a product
// shift S_prod. GPGVAR: bivariate filters in S^k kron S_F^l.
enum class Family { VAR, GVAR, PGVAR, GPGVAR };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

// GVAR on F > 1 channels: one coefficient set per feature channel, or one
// set shared by all channels.
enum class ChannelMode { separate, shared };

std::string_view to_string(ChannelMode mode);
ChannelMode parse_channel_mode(std::string_view name);

// Everything about a model except its coefficients.
struct ModelStructure {
  Family family = Family::PGVAR;
  int lag_order = 1;      // P
  int node_order = 0;     // K
  int feature_order = 0;  // L
  int n_nodes = 1;
  int n_features = 1;
  ChannelMode channels = ChannelMode::separate;
  std::shared_ptr<const Graph> node_graph;
  std::shared_ptr<const Graph> feature_graph;
  std::optional<ProductShiftOperator> product;  // PGVAR only

  static ModelStructure var(int n_nodes, int n_features, int lag_order);
  static ModelStructure gvar(std::shared_ptr<const Graph> node_graph, int n_features, int lag_order,
                             int node_order, ChannelMode channels = ChannelMode::separate);
  static ModelStructure pgvar(const ProductShiftOperator& op, int lag_order, int node_order);
  static ModelStructure gpgvar(std::shared_ptr<const Graph> node_graph, std::shared_ptr<const Graph> feature_graph,
                               int lag_order, int node_order, int feature_order);

  Eigen::Index dimension() const { return static_cast<Eigen::Index>(n_nodes) * n_features; }
  // Regressors per lag: K+1 for GVAR/PGVAR, (K+1)(L+1) for GPGVAR, NF for VAR.
  int basis_size() const;
  // Independent coefficient sets: F for separate-channel GVAR, else 1.
  int coefficient_sets() const;
  // Scalars per coefficient set, i.e. P * basis_size() (P * (NF)^2 for VAR).
  std::int64_t parameter_count() const;
  std::int64_t total_parameter_count() const { return parameter_count() * coefficient_sets(); }

  void validate() const;
};

// Coefficients follow the recursion x_t = -sum_p H_p x_{t-p} + e_t, so a
// persistence predictor has h_0 = -1.
struct ModelParams {
  ModelStructure structure;
  // Non-VAR families, index ((set * P + (lag - 1)) * (K + 1) + k) * (L + 1) + l.
  std::vector<double> coeffs;
  // VAR only, A_1..A_P.
  std::vector<Eigen::MatrixXd> var_lags;

  static ModelParams zeros(ModelStructure structure);

  std::size_t coeff_index(int lag, int k, int l = 0, int set = 0) const;
  double coeff(int lag, int k, int l = 0, int set = 0) const { return coeffs[coeff_index(lag, k, l, set)]; }
  double& coeff(int lag, int k, int l = 0, int set = 0) { return coeffs[coeff_index(lag, k, l, set)]; }

  void validate() const;
};

// H_p x for lag p in 1..P.
Eigen::VectorXd apply_lag_filter(const ModelParams& m, int lag, const Eigen::VectorXd& x,
                                 const ExecOptions& opts = {});

// Dense H_p. Only for small N*F (test oracles and the closed-form MSE).
Eigen::MatrixXd dense_lag_matrix(const ModelParams& m, int lag);

// x_hat_t = -sum_p H_p x_{t-p}; history[0] is x_{t-1}.
Eigen::VectorXd predict_one_step(const ModelParams& m, std::span<const Eigen::VectorXd> history,
                                 const ExecOptions& opts = {});

enum class RolloutMode { teacher_forced, recursive };

// Predictions for steps [t_start, t_end). Teacher-forced feeds ground truth
// as lags; recursive feeds back its own predictions for steps >= t_start.
SignalSequence rollout(const ModelParams& m, const SignalSequence& seq, int t_start, int t_end,
                       RolloutMode mode = RolloutMode::teacher_forced, const ExecOptions& opts = {});

// PGVAR (cartesian, edgeless feature graph) or GPGVAR (L = 0) to the
// equivalent shared-channel GVAR.
ModelParams reduce_model(const ModelParams& m);

// Shared-channel (or F = 1) GVAR written as a PGVAR over a cartesian product
// with an edgeless feature graph, or as a GPGVAR with L = 0.
ModelParams lift_to_pgvar(const ModelParams& gvar);
ModelParams lift_to_gpgvar(const ModelParams& gvar);

}  // namespace pgvar
