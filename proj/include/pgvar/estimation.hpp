#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pgvar/exec.hpp"
#include "pgvar/models.hpp"
#include "pgvar/product.hpp"
#include "pgvar/signal.hpp"

namespace pgvar {

// Stacked regression for targets t in [segment.begin + P, segment.end).
// Rows run over t, then over signal entries (only entries of `channel`
// when channel >= 0). Column (p - 1) * basis_size + b holds basis b of
// x_{t-p}, matching ModelParams::coeff_index.
struct Regression {
  Eigen::MatrixXd design;
  Eigen::VectorXd target;
};

Regression build_regression(const SignalSequence& seq, Segment segment, const ModelStructure& structure,
                            int channel = -1, const ExecOptions& opts = {});

struct LeastSquaresSolution {
  Eigen::VectorXd h;  // -a, ready to store as model coefficients
  double lambda = 0.0;
  double condition_number = 0.0;  // of the regularised Gram matrix
};

// Default ridge weight 1e-8 * tr(G) / Q.
double default_ridge_lambda(const Eigen::MatrixXd& gram);

// argmin_a ||target - design a||^2 + lambda ||a||^2 via Cholesky on the
// normal equations. nullopt selects default_ridge_lambda.
LeastSquaresSolution least_squares_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                       std::optional<double> ridge_lambda);

struct ModelFit {
  ModelParams model;
  double lambda = 0.0;
  double condition_number = 0.0;
  double residual_variance = 0.0;  // mean squared residual per entry
  double residual_step_mse = 0.0;  // mean of ||e_t||^2 over fitted steps
  int fitted_steps = 0;
};

// Least-squares fit on one segment. Separate-channel GVAR fits each channel
// independently.
ModelFit fit_model(const SignalSequence& seq, Segment segment, const ModelStructure& structure,
                   std::optional<double> ridge_lambda, const ExecOptions& opts = {});

// Windowed second moments M(p1, p2) = 1/(T-P) sum_{t=P}^{T-1} x_{t-p1} x_{t-p2}^T
// for 0 <= p1, p2 <= P. R_p = M(0, p), R_{-p} = R_p^T.
class AutocorrelationSet {
 public:
  AutocorrelationSet(int max_lag, int window_steps, std::vector<Eigen::MatrixXd> upper_pairs);

  int max_lag() const { return max_lag_; }
  int window_steps() const { return window_steps_; }
  Eigen::MatrixXd lag(int p) const;
  Eigen::MatrixXd pair(int p1, int p2) const;

 private:
  std::size_t index(int p1, int p2) const;

  int max_lag_;
  int window_steps_;
  std::vector<Eigen::MatrixXd> pairs_;  // p1 <= p2
};

AutocorrelationSet empirical_autocorrelation(const SignalSequence& seq, int max_lag);

enum class MomentWindow {
  matched,     // cross terms use M(p1, p2); equals the empirical residual MSE
  stationary,  // cross terms use R_{p2 - p1}
};

// tr(R_0 + sum_p H_p R_{-p} + sum_p R_p H_p^T + sum_{p1,p2} H_p1 R_{p2-p1} H_p2^T),
// the expected ||x_t - x_hat_t||^2. Dense; intended for N*F in the tens.
double mse_closed_form(const ModelParams& m, const AutocorrelationSet& r,
                       MomentWindow window = MomentWindow::matched);

struct FitConfig {
  Family family = Family::PGVAR;
  std::vector<int> lag_grid{1};
  std::vector<int> node_grid{0};
  std::vector<int> feature_grid{0};
  std::optional<double> ridge_lambda;
  double in_fraction = 0.7;
  double train_fraction = 0.7;
  ProductKind product = ProductKind::cartesian;
  std::vector<ProductTerm> custom_terms;
  ChannelMode channels = ChannelMode::separate;

  void validate() const;
};

struct GraphSet {
  std::shared_ptr<const Graph> node;
  std::shared_ptr<const Graph> feature;
};

ModelStructure make_structure(const FitConfig& config, const GraphSet& graphs, int n_nodes, int n_features,
                              int lag_order, int node_order, int feature_order);

struct GridRecord {
  int lag_order = 0;
  int node_order = 0;
  int feature_order = 0;
  std::int64_t parameter_count = 0;
  std::optional<double> validation_rnmse;
  std::string error;
};

struct FitReport {
  int lag_order = 0;
  int node_order = 0;
  int feature_order = 0;
  ModelParams model;
  SeriesSplit split;
  double train_rnmse = 0.0;
  double validation_rnmse = 0.0;
  double test_rnmse = 0.0;
  double residual_variance = 0.0;
  double lambda = 0.0;
  double condition_number = 0.0;
  std::vector<GridRecord> grid;
};

// Fits every grid point on the training segment, picks the lowest
// validation rNMSE (ties: fewer parameters, then smaller P, K, L), refits
// on the in-sample segment and scores the test segment. Grid points run in
// parallel; the report does not depend on the schedule. When `progress` is
// given, one JSON line per grid point is written in grid order.
FitReport grid_search(const FitConfig& config, const SignalSequence& seq, const GraphSet& graphs,
                      std::ostream* progress = nullptr);

}  // namespace pgvar
