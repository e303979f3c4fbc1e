#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pgvar/signal.hpp"

namespace pgvar {

// sqrt(sum_t ||pred_t - truth_t||^2 / sum_t ||truth_t||^2) over the rows.
double rnmse(const RowMatrix& pred, const RowMatrix& truth);
double rnmse(const SignalSequence& pred, const SignalSequence& truth);

struct EvalReport {
  double rnmse = 0.0;
  int steps = 0;  // tau
  // Per-step error ratio; empty optional where the truth step is all zero.
  std::vector<std::optional<double>> per_step_rnmse;
  // Mean squared error per node over steps and features.
  std::vector<double> per_node_mse;
  // rNMSE restricted to each feature channel.
  std::vector<std::optional<double>> per_feature_rnmse;
};

EvalReport evaluate(const SignalSequence& pred, const SignalSequence& truth);

}  // namespace pgvar
