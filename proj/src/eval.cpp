#include "pgvar/eval.hpp"

#include <cmath>

#include "pgvar/error.hpp"
#include "pgvar/model_io.hpp"

namespace pgvar {

double rnmse(const RowMatrix& pred, const RowMatrix& truth) {
  require(pred.rows() == truth.rows() && pred.cols() == truth.cols(), ErrorCode::dimension_mismatch,
          "prediction and truth shapes differ");
  const double energy = truth.squaredNorm();
  require(energy > 0.0, ErrorCode::undefined_normalization, "truth is all zero; rNMSE is undefined");
  return std::sqrt((pred - truth).squaredNorm() / energy);
}

double rnmse(const SignalSequence& pred, const SignalSequence& truth) { return rnmse(pred.data(), truth.data()); }

EvalReport evaluate(const SignalSequence& pred, const SignalSequence& truth) {
  require(pred.n_nodes() == truth.n_nodes() && pred.n_features() == truth.n_features(),
          ErrorCode::dimension_mismatch, "prediction and truth layouts differ");
  EvalReport report;
  report.rnmse = rnmse(pred, truth);
  report.steps = truth.n_steps();
  const RowMatrix err = pred.data() - truth.data();
  const int n = truth.n_nodes();
  const int f = truth.n_features();

  for (int t = 0; t < report.steps; ++t) {
    const double energy = truth.data().row(t).squaredNorm();
    if (energy > 0.0)
      report.per_step_rnmse.emplace_back(std::sqrt(err.row(t).squaredNorm() / energy));
    else
      report.per_step_rnmse.emplace_back(std::nullopt);
  }
  report.per_node_mse.assign(n, 0.0);
  std::vector<double> feat_err(f, 0.0), feat_energy(f, 0.0);
  for (int t = 0; t < report.steps; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < f; ++c) {
        const auto idx = static_cast<Eigen::Index>(i) * f + c;
        const double e2 = err(t, idx) * err(t, idx);
        report.per_node_mse[i] += e2;
        feat_err[c] += e2;
        feat_energy[c] += truth.data()(t, idx) * truth.data()(t, idx);
      }
    }
  }
  for (double& v : report.per_node_mse) v /= static_cast<double>(report.steps) * f;
  for (int c = 0; c < f; ++c) {
    if (feat_energy[c] > 0.0)
      report.per_feature_rnmse.emplace_back(std::sqrt(feat_err[c] / feat_energy[c]));
    else
      report.per_feature_rnmse.emplace_back(std::nullopt);
  }
  return report;
}

namespace {

nlohmann::ordered_json optional_array(const std::vector<std::optional<double>>& values) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& v : values) out.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
  return out;
}

nlohmann::ordered_json segment_json(const Segment& s) { return {s.begin, s.end}; }

}  // namespace

nlohmann::ordered_json to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["rnmse"] = report.rnmse;
  j["tau"] = report.steps;
  j["per_step_rnmse"] = optional_array(report.per_step_rnmse);
  j["per_node_mse"] = report.per_node_mse;
  j["per_feature_rnmse"] = optional_array(report.per_feature_rnmse);
  return j;
}

nlohmann::ordered_json to_json(const GridRecord& record) {
  nlohmann::ordered_json j;
  j["P"] = record.lag_order;
  j["K"] = record.node_order;
  j["L"] = record.feature_order;
  j["parameters"] = record.parameter_count;
  j["validation_rnmse"] =
      record.validation_rnmse ? nlohmann::ordered_json(*record.validation_rnmse) : nlohmann::ordered_json(nullptr);
  if (!record.error.empty()) j["error"] = record.error;
  return j;
}

nlohmann::ordered_json to_json(const FitReport& report) {
  nlohmann::ordered_json j;
  const auto& s = report.model.structure;
  j["family"] = std::string(to_string(s.family));
  j["selected"] = {{"P", report.lag_order}, {"K", report.node_order}, {"L", report.feature_order}};
  j["parameters"] = s.total_parameter_count();
  j["coeffs"] = coeffs_to_json(report.model);
  j["split"] = {{"train", segment_json(report.split.train)},
                {"validation", segment_json(report.split.validation)},
                {"test", segment_json(report.split.test)}};
  j["train_rnmse"] = report.train_rnmse;
  j["validation_rnmse"] = report.validation_rnmse;
  j["test_rnmse"] = report.test_rnmse;
  j["residual_variance"] = report.residual_variance;
  j["ridge_lambda"] = report.lambda;
  j["condition_number"] = report.condition_number;
  auto grid = nlohmann::ordered_json::array();
  for (const auto& r : report.grid) grid.push_back(to_json(r));
  j["grid"] = grid;
  return j;
}

}  // namespace pgvar
