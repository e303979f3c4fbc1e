#include "pgvar/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <tuple>

#include "json.hpp"
#include "pgvar/error.hpp"
#include "pgvar/filtering.hpp"
#include "pgvar/metrics.hpp"

namespace pgvar {

namespace {

// Basis signals of one input signal, ordered as the design columns of a lag.
std::vector<Eigen::VectorXd> basis_of(const ModelStructure& s, const Eigen::VectorXd& x, const ExecOptions& opts) {
  switch (s.family) {
    case Family::GVAR: return node_shift_powers(*s.node_graph, s.n_features, x, s.node_order, opts);
    case Family::PGVAR: return product_shift_powers(*s.product, x, s.node_order, opts);
    case Family::GPGVAR:
      return kronecker_shift_powers(*s.node_graph, *s.feature_graph, x, s.node_order, s.feature_order, opts);
    case Family::VAR: break;
  }
  fail(ErrorCode::unsupported, "VAR has no shift basis");
}

void require_fit_window(const SignalSequence& seq, Segment segment, int lag_order) {
  require(segment.begin >= 0 && segment.end <= seq.n_steps() && segment.begin <= segment.end,
          ErrorCode::invalid_parameter, "fit segment outside the sequence");
  require(segment.size() > lag_order, ErrorCode::insufficient_data,
          "fit segment has " + std::to_string(segment.size()) + " steps; P = " + std::to_string(lag_order) +
              " needs more than " + std::to_string(lag_order));
}

constexpr double kMinReciprocalCondition = 64 * std::numeric_limits<double>::epsilon();

// Cholesky of the regularised Gram matrix; throws when it is singular.
Eigen::LLT<Eigen::MatrixXd> factor_gram(Eigen::MatrixXd gram, double lambda, double& condition_number) {
  gram.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  require(llt.info() == Eigen::Success && rcond >= kMinReciprocalCondition, ErrorCode::rank_deficient,
          "normal equations are singular (reciprocal condition " + std::to_string(rcond) +
              "); use a positive ridge_lambda");
  condition_number = 1.0 / rcond;
  return llt;
}

ModelFit fit_var(const SignalSequence& seq, Segment segment, const ModelStructure& s,
                 std::optional<double> ridge_lambda) {
  const int P = s.lag_order;
  const auto d = s.dimension();
  const int steps = segment.size() - P;
  Eigen::MatrixXd x(steps, d * P);
  Eigen::MatrixXd y(steps, d);
  for (int r = 0; r < steps; ++r) {
    const int t = segment.begin + P + r;
    y.row(r) = seq.step(t).transpose();
    for (int p = 1; p <= P; ++p) x.block(r, (p - 1) * d, 1, d) = seq.step(t - p).transpose();
  }
  require(steps >= x.cols(), ErrorCode::insufficient_data,
          "dense VAR needs at least " + std::to_string(x.cols()) + " fitted steps, segment gives " +
              std::to_string(steps));
  const Eigen::MatrixXd gram = x.transpose() * x;
  ModelFit fit{ModelParams::zeros(s)};
  fit.lambda = ridge_lambda ? *ridge_lambda : default_ridge_lambda(gram);
  require(fit.lambda >= 0.0, ErrorCode::invalid_parameter, "ridge_lambda must be nonnegative");
  const auto llt = factor_gram(gram, fit.lambda, fit.condition_number);
  const Eigen::MatrixXd w = llt.solve(x.transpose() * y);
  for (int p = 1; p <= P; ++p) fit.model.var_lags[p - 1] = -w.block((p - 1) * d, 0, d, d).transpose();
  const Eigen::MatrixXd residual = y - x * w;
  fit.fitted_steps = steps;
  fit.residual_variance = residual.squaredNorm() / static_cast<double>(residual.size());
  fit.residual_step_mse = residual.squaredNorm() / steps;
  return fit;
}

}  // namespace

Regression build_regression(const SignalSequence& seq, Segment segment, const ModelStructure& structure,
                            int channel, const ExecOptions& opts) {
  const auto& s = structure;
  s.validate();
  require(s.family != Family::VAR, ErrorCode::unsupported, "dense VAR is fitted by fit_model directly");
  require(seq.n_nodes() == s.n_nodes && seq.n_features() == s.n_features, ErrorCode::dimension_mismatch,
          "sequence shape does not match the model");
  require(channel < s.n_features, ErrorCode::invalid_parameter, "channel out of range");
  require_fit_window(seq, segment, s.lag_order);

  const int P = s.lag_order;
  const int B = s.basis_size();
  const int F = s.n_features;
  const auto d = s.dimension();
  const Eigen::Index rows_per_step = channel >= 0 ? s.n_nodes : d;
  const int steps = segment.size() - P;

  // Each x_s feeds P different targets; shift it once.
  std::vector<std::vector<Eigen::VectorXd>> basis(segment.size() - 1);
  for (int j = 0; j + 1 < segment.size(); ++j) basis[j] = basis_of(s, seq.step(segment.begin + j), opts);

  Regression reg{Eigen::MatrixXd(steps * rows_per_step, P * B), Eigen::VectorXd(steps * rows_per_step)};
  for (int r = 0; r < steps; ++r) {
    const int t = segment.begin + P + r;
    const Eigen::Index row0 = r * rows_per_step;
    const auto x_t = seq.step(t);
    if (channel < 0) {
      reg.target.segment(row0, d) = x_t;
    } else {
      for (int i = 0; i < s.n_nodes; ++i) reg.target[row0 + i] = x_t[static_cast<Eigen::Index>(i) * F + channel];
    }
    for (int p = 1; p <= P; ++p) {
      const auto& lagged = basis[t - p - segment.begin];
      for (int b = 0; b < B; ++b) {
        const Eigen::Index col = (p - 1) * B + b;
        if (channel < 0) {
          reg.design.col(col).segment(row0, d) = lagged[b];
        } else {
          for (int i = 0; i < s.n_nodes; ++i)
            reg.design(row0 + i, col) = lagged[b][static_cast<Eigen::Index>(i) * F + channel];
        }
      }
    }
  }
  return reg;
}

double default_ridge_lambda(const Eigen::MatrixXd& gram) {
  return 1e-8 * gram.trace() / static_cast<double>(gram.rows());
}

LeastSquaresSolution least_squares_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                       std::optional<double> ridge_lambda) {
  require(design.rows() == target.size(), ErrorCode::dimension_mismatch, "design and target row counts differ");
  require(design.cols() >= 1, ErrorCode::invalid_parameter, "design needs at least one column");
  require(design.rows() >= design.cols(), ErrorCode::insufficient_data,
          "least squares needs at least as many rows (" + std::to_string(design.rows()) + ") as unknowns (" +
              std::to_string(design.cols()) + ")");
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(design.cols(), design.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

  LeastSquaresSolution sol;
  sol.lambda = ridge_lambda ? *ridge_lambda : default_ridge_lambda(gram);
  require(sol.lambda >= 0.0 && std::isfinite(sol.lambda), ErrorCode::invalid_parameter,
          "ridge_lambda must be finite and nonnegative");
  const auto llt = factor_gram(std::move(gram), sol.lambda, sol.condition_number);
  sol.h = -llt.solve(design.transpose() * target);
  return sol;
}

ModelFit fit_model(const SignalSequence& seq, Segment segment, const ModelStructure& structure,
                   std::optional<double> ridge_lambda, const ExecOptions& opts) {
  structure.validate();
  require_fit_window(seq, segment, structure.lag_order);
  if (structure.family == Family::VAR) return fit_var(seq, segment, structure, ridge_lambda);

  ModelFit fit{ModelParams::zeros(structure)};
  const int sets = structure.coefficient_sets();
  const auto per_set = static_cast<Eigen::Index>(structure.parameter_count());
  double sq_residual = 0.0;
  Eigen::Index entries = 0;
  for (int set = 0; set < sets; ++set) {
    const int channel = sets > 1 ? set : -1;
    const auto reg = build_regression(seq, segment, structure, channel, opts);
    const auto sol = least_squares_fit(reg.design, reg.target, ridge_lambda);
    std::copy(sol.h.data(), sol.h.data() + per_set, fit.model.coeffs.begin() + set * per_set);
    fit.lambda = std::max(fit.lambda, sol.lambda);
    fit.condition_number = std::max(fit.condition_number, sol.condition_number);
    sq_residual += (reg.target + reg.design * sol.h).squaredNorm();
    entries += reg.target.size();
  }
  fit.fitted_steps = segment.size() - structure.lag_order;
  fit.residual_variance = sq_residual / static_cast<double>(entries);
  fit.residual_step_mse = sq_residual / fit.fitted_steps;
  return fit;
}

AutocorrelationSet::AutocorrelationSet(int max_lag, int window_steps, std::vector<Eigen::MatrixXd> upper_pairs)
    : max_lag_(max_lag), window_steps_(window_steps), pairs_(std::move(upper_pairs)) {
  require(static_cast<int>(pairs_.size()) == (max_lag + 1) * (max_lag + 2) / 2, ErrorCode::invalid_input,
          "autocorrelation set has the wrong number of lag pairs");
}

std::size_t AutocorrelationSet::index(int p1, int p2) const {
  // Row-wise upper triangle of a (P+1) x (P+1) grid.
  return static_cast<std::size_t>(p1 * (2 * max_lag_ + 3 - p1) / 2 + (p2 - p1));
}

Eigen::MatrixXd AutocorrelationSet::pair(int p1, int p2) const {
  require(p1 >= 0 && p2 >= 0 && p1 <= max_lag_ && p2 <= max_lag_, ErrorCode::invalid_input,
          "lag pair (" + std::to_string(p1) + "," + std::to_string(p2) + ") not in the set");
  if (p1 <= p2) return pairs_[index(p1, p2)];
  return pairs_[index(p2, p1)].transpose();
}

Eigen::MatrixXd AutocorrelationSet::lag(int p) const {
  require(std::abs(p) <= max_lag_, ErrorCode::invalid_input,
          "lag " + std::to_string(p) + " not in the set (max " + std::to_string(max_lag_) + ")");
  return p >= 0 ? pair(0, p) : pair(0, -p).transpose();
}

AutocorrelationSet empirical_autocorrelation(const SignalSequence& seq, int max_lag) {
  require(max_lag >= 0, ErrorCode::invalid_parameter, "max_lag must be nonnegative");
  require(seq.n_steps() > max_lag, ErrorCode::insufficient_data, "autocorrelation needs T > P");
  const int window = seq.n_steps() - max_lag;
  const auto& x = seq.data();
  std::vector<Eigen::MatrixXd> pairs;
  for (int p1 = 0; p1 <= max_lag; ++p1) {
    for (int p2 = p1; p2 <= max_lag; ++p2) {
      // rows t-p1 and t-p2 for t = P..T-1
      pairs.push_back(x.middleRows(max_lag - p1, window).transpose() * x.middleRows(max_lag - p2, window) /
                      static_cast<double>(window));
    }
  }
  return AutocorrelationSet(max_lag, window, std::move(pairs));
}

double mse_closed_form(const ModelParams& m, const AutocorrelationSet& r, MomentWindow window) {
  const int P = m.structure.lag_order;
  require(r.max_lag() >= P, ErrorCode::invalid_input,
          "autocorrelation set covers lags up to " + std::to_string(r.max_lag()) + ", model needs " +
              std::to_string(P));
  std::vector<Eigen::MatrixXd> h(P);
  for (int p = 1; p <= P; ++p) h[p - 1] = dense_lag_matrix(m, p);

  double total = r.lag(0).trace();
  for (int p = 1; p <= P; ++p) {
    total += (h[p - 1] * r.lag(-p)).trace();
    total += (r.lag(p) * h[p - 1].transpose()).trace();
  }
  for (int p1 = 1; p1 <= P; ++p1) {
    for (int p2 = 1; p2 <= P; ++p2) {
      const Eigen::MatrixXd moment = window == MomentWindow::matched ? r.pair(p1, p2) : r.lag(p2 - p1);
      total += (h[p1 - 1] * moment * h[p2 - 1].transpose()).trace();
    }
  }
  return total;
}

void FitConfig::validate() const {
  require(!lag_grid.empty() && !node_grid.empty() && !feature_grid.empty(), ErrorCode::invalid_parameter,
          "grids must be non-empty");
  for (int p : lag_grid) require(p >= 1, ErrorCode::invalid_parameter, "every P in the grid must be >= 1");
  for (int k : node_grid) require(k >= 0, ErrorCode::invalid_parameter, "every K in the grid must be >= 0");
  for (int l : feature_grid) require(l >= 0, ErrorCode::invalid_parameter, "every L in the grid must be >= 0");
  if (ridge_lambda)
    require(*ridge_lambda >= 0.0, ErrorCode::invalid_parameter, "ridge_lambda must be nonnegative");
}

ModelStructure make_structure(const FitConfig& config, const GraphSet& graphs, int n_nodes, int n_features,
                              int lag_order, int node_order, int feature_order) {
  switch (config.family) {
    case Family::VAR: return ModelStructure::var(n_nodes, n_features, lag_order);
    case Family::GVAR: return ModelStructure::gvar(graphs.node, n_features, lag_order, node_order, config.channels);
    case Family::PGVAR:
      return ModelStructure::pgvar(make_product(graphs.node, graphs.feature, config.product, config.custom_terms),
                                   lag_order, node_order);
    case Family::GPGVAR:
      return ModelStructure::gpgvar(graphs.node, graphs.feature, lag_order, node_order, feature_order);
  }
  fail(ErrorCode::invalid_parameter, "unknown family");
}

namespace {

double teacher_forced_rnmse(const ModelParams& m, const SignalSequence& seq, Segment seg) {
  const auto pred = rollout(m, seq, seg.begin, seg.end, RolloutMode::teacher_forced);
  return rnmse(pred, seq.slice(seg.begin, seg.end));
}

}  // namespace

FitReport grid_search(const FitConfig& config, const SignalSequence& seq, const GraphSet& graphs,
                      std::ostream* progress) {
  config.validate();
  const std::vector<int> node_grid = config.family == Family::VAR ? std::vector<int>{0} : config.node_grid;
  const std::vector<int> feature_grid =
      config.family == Family::GPGVAR ? config.feature_grid : std::vector<int>{0};
  const int max_lag = *std::max_element(config.lag_grid.begin(), config.lag_grid.end());
  const auto split = split_series(seq.n_steps(), config.in_fraction, config.train_fraction, max_lag);

  std::vector<GridRecord> records;
  for (int p : config.lag_grid)
    for (int k : node_grid)
      for (int l : feature_grid) records.push_back({p, k, l, 0, std::nullopt, {}});

  const auto n_points = static_cast<std::int64_t>(records.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n_points; ++i) {
    auto& rec = records[i];
    try {
      const auto s = make_structure(config, graphs, seq.n_nodes(), seq.n_features(), rec.lag_order,
                                    rec.node_order, rec.feature_order);
      rec.parameter_count = s.total_parameter_count();
      const auto fit = fit_model(seq, split.train, s, config.ridge_lambda);
      rec.validation_rnmse = teacher_forced_rnmse(fit.model, seq, split.validation);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  }

  if (progress) {
    for (const auto& rec : records) {
      nlohmann::ordered_json line;
      line["P"] = rec.lag_order;
      line["K"] = rec.node_order;
      line["L"] = rec.feature_order;
      line["parameters"] = rec.parameter_count;
      line["validation_rnmse"] = rec.validation_rnmse ? nlohmann::ordered_json(*rec.validation_rnmse)
                                                      : nlohmann::ordered_json(nullptr);
      if (!rec.error.empty()) line["error"] = rec.error;
      *progress << line.dump() << '\n';
    }
    progress->flush();
  }

  const GridRecord* best = nullptr;
  auto key = [](const GridRecord& r) {
    return std::make_tuple(*r.validation_rnmse, r.parameter_count, r.lag_order, r.node_order, r.feature_order);
  };
  for (const auto& rec : records) {
    if (!rec.validation_rnmse || !std::isfinite(*rec.validation_rnmse)) continue;
    if (!best || key(rec) < key(*best)) best = &rec;
  }
  if (!best) {
    std::string msg = "every grid point failed:";
    for (const auto& rec : records)
      msg += " (P=" + std::to_string(rec.lag_order) + ",K=" + std::to_string(rec.node_order) +
             ",L=" + std::to_string(rec.feature_order) + "): " + rec.error + ";";
    fail(ErrorCode::insufficient_data, msg);
  }

  const auto s = make_structure(config, graphs, seq.n_nodes(), seq.n_features(), best->lag_order, best->node_order,
                                best->feature_order);
  auto refit = fit_model(seq, split.in_sample(), s, config.ridge_lambda);

  FitReport report{best->lag_order, best->node_order, best->feature_order, refit.model, split};
  report.validation_rnmse = *best->validation_rnmse;
  report.train_rnmse = teacher_forced_rnmse(refit.model, seq, {best->lag_order, split.in_sample().end});
  report.test_rnmse = teacher_forced_rnmse(refit.model, seq, split.test);
  report.residual_variance = refit.residual_variance;
  report.lambda = refit.lambda;
  report.condition_number = refit.condition_number;
  report.grid = std::move(records);
  return report;
}

}  // namespace pgvar
