#include "pgvar/models.hpp"

#include <cmath>
#include <string>

#include "pgvar/error.hpp"
#include "pgvar/filtering.hpp"

namespace pgvar {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::VAR: return "VAR";
    case Family::GVAR: return "GVAR";
    case Family::PGVAR: return "PGVAR";
    case Family::GPGVAR: return "GPGVAR";
  }
  return "PGVAR";
}

Family parse_family(std::string_view name) {
  if (name == "VAR" || name == "var") return Family::VAR;
  if (name == "GVAR" || name == "gvar") return Family::GVAR;
  if (name == "PGVAR" || name == "pgvar") return Family::PGVAR;
  if (name == "GPGVAR" || name == "gpgvar") return Family::GPGVAR;
  fail(ErrorCode::invalid_parameter, "unknown model family '" + std::string(name) + "'");
}

std::string_view to_string(ChannelMode mode) { return mode == ChannelMode::shared ? "shared" : "separate"; }

ChannelMode parse_channel_mode(std::string_view name) {
  if (name == "separate") return ChannelMode::separate;
  if (name == "shared") return ChannelMode::shared;
  fail(ErrorCode::invalid_parameter, "unknown channel mode '" + std::string(name) + "'");
}

ModelStructure ModelStructure::var(int n_nodes, int n_features, int lag_order) {
  ModelStructure s;
  s.family = Family::VAR;
  s.lag_order = lag_order;
  s.n_nodes = n_nodes;
  s.n_features = n_features;
  s.validate();
  return s;
}

ModelStructure ModelStructure::gvar(std::shared_ptr<const Graph> node_graph, int n_features, int lag_order,
                                    int node_order, ChannelMode channels) {
  ModelStructure s;
  s.family = Family::GVAR;
  s.lag_order = lag_order;
  s.node_order = node_order;
  s.n_nodes = node_graph ? node_graph->n_nodes() : 0;
  s.n_features = n_features;
  s.channels = channels;
  s.node_graph = std::move(node_graph);
  s.validate();
  return s;
}

ModelStructure ModelStructure::pgvar(const ProductShiftOperator& op, int lag_order, int node_order) {
  ModelStructure s;
  s.family = Family::PGVAR;
  s.lag_order = lag_order;
  s.node_order = node_order;
  s.n_nodes = op.n_nodes();
  s.n_features = op.n_features();
  s.node_graph = op.node_graph_ptr();
  s.feature_graph = op.feature_graph_ptr();
  s.product = op;
  s.validate();
  return s;
}

ModelStructure ModelStructure::gpgvar(std::shared_ptr<const Graph> node_graph,
                                      std::shared_ptr<const Graph> feature_graph, int lag_order, int node_order,
                                      int feature_order) {
  ModelStructure s;
  s.family = Family::GPGVAR;
  s.lag_order = lag_order;
  s.node_order = node_order;
  s.feature_order = feature_order;
  s.n_nodes = node_graph ? node_graph->n_nodes() : 0;
  s.n_features = feature_graph ? feature_graph->n_nodes() : 0;
  s.node_graph = std::move(node_graph);
  s.feature_graph = std::move(feature_graph);
  s.validate();
  return s;
}

int ModelStructure::basis_size() const {
  switch (family) {
    case Family::VAR: return static_cast<int>(dimension());
    case Family::GVAR:
    case Family::PGVAR: return node_order + 1;
    case Family::GPGVAR: return (node_order + 1) * (feature_order + 1);
  }
  return 0;
}

int ModelStructure::coefficient_sets() const {
  return family == Family::GVAR && channels == ChannelMode::separate ? n_features : 1;
}

std::int64_t ModelStructure::parameter_count() const {
  if (family == Family::VAR) return static_cast<std::int64_t>(lag_order) * dimension() * dimension();
  return static_cast<std::int64_t>(lag_order) * basis_size();
}

void ModelStructure::validate() const {
  require(lag_order >= 1, ErrorCode::invalid_parameter, "lag order P must be >= 1");
  require(node_order >= 0 && feature_order >= 0, ErrorCode::invalid_parameter, "filter orders must be >= 0");
  require(n_nodes > 0 && n_features > 0, ErrorCode::invalid_parameter, "model needs N, F > 0");
  switch (family) {
    case Family::VAR: break;
    case Family::GVAR:
      require(node_graph != nullptr, ErrorCode::invalid_parameter, "GVAR needs a node graph");
      require(node_graph->n_nodes() == n_nodes, ErrorCode::dimension_mismatch, "GVAR graph size mismatch");
      require(feature_order == 0, ErrorCode::invalid_parameter, "GVAR has no feature order");
      break;
    case Family::PGVAR:
      require(product.has_value(), ErrorCode::invalid_parameter, "PGVAR needs a product shift operator");
      require(product->n_nodes() == n_nodes && product->n_features() == n_features, ErrorCode::dimension_mismatch,
              "PGVAR product size mismatch");
      require(feature_order == 0, ErrorCode::invalid_parameter, "PGVAR has no feature order");
      break;
    case Family::GPGVAR:
      require(node_graph && feature_graph, ErrorCode::invalid_parameter, "GPGVAR needs node and feature graphs");
      require(node_graph->n_nodes() == n_nodes && feature_graph->n_nodes() == n_features,
              ErrorCode::dimension_mismatch, "GPGVAR graph size mismatch");
      break;
  }
}

ModelParams ModelParams::zeros(ModelStructure structure) {
  structure.validate();
  ModelParams m;
  m.structure = std::move(structure);
  if (m.structure.family == Family::VAR) {
    const auto d = m.structure.dimension();
    m.var_lags.assign(m.structure.lag_order, Eigen::MatrixXd::Zero(d, d));
  } else {
    m.coeffs.assign(static_cast<std::size_t>(m.structure.total_parameter_count()), 0.0);
  }
  return m;
}

std::size_t ModelParams::coeff_index(int lag, int k, int l, int set) const {
  const auto& s = structure;
  return ((static_cast<std::size_t>(set) * s.lag_order + (lag - 1)) * (s.node_order + 1) + k) *
             (s.feature_order + 1) +
         l;
}

void ModelParams::validate() const {
  structure.validate();
  if (structure.family == Family::VAR) {
    require(static_cast<int>(var_lags.size()) == structure.lag_order, ErrorCode::invalid_parameter,
            "VAR needs one matrix per lag");
    for (const auto& a : var_lags) {
      require(a.rows() == structure.dimension() && a.cols() == structure.dimension(), ErrorCode::dimension_mismatch,
              "VAR lag matrix has wrong shape");
      require(a.allFinite(), ErrorCode::invalid_parameter, "non-finite VAR coefficient");
    }
    return;
  }
  require(static_cast<std::int64_t>(coeffs.size()) == structure.total_parameter_count(),
          ErrorCode::invalid_parameter,
          "expected " + std::to_string(structure.total_parameter_count()) + " coefficients, got " +
              std::to_string(coeffs.size()));
  for (double c : coeffs) require(std::isfinite(c), ErrorCode::invalid_parameter, "non-finite coefficient");
}

namespace {

FilterCoeffs lag_taps(const ModelParams& m, int lag, int set = 0) {
  const auto& s = m.structure;
  Eigen::MatrixXd taps(s.node_order + 1, s.feature_order + 1);
  for (int k = 0; k <= s.node_order; ++k)
    for (int l = 0; l <= s.feature_order; ++l) taps(k, l) = m.coeff(lag, k, l, set);
  return FilterCoeffs(std::move(taps));
}

}  // namespace

Eigen::VectorXd apply_lag_filter(const ModelParams& m, int lag, const Eigen::VectorXd& x, const ExecOptions& opts) {
  const auto& s = m.structure;
  require(lag >= 1 && lag <= s.lag_order, ErrorCode::invalid_parameter, "lag out of range");
  require(x.size() == s.dimension(), ErrorCode::dimension_mismatch,
          "signal length " + std::to_string(x.size()) + " != N*F = " + std::to_string(s.dimension()));
  switch (s.family) {
    case Family::VAR: return m.var_lags[lag - 1] * x;
    case Family::GVAR: {
      const auto powers = node_shift_powers(*s.node_graph, s.n_features, x, s.node_order, opts);
      Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
      const int F = s.n_features;
      for (int f = 0; f < F; ++f) {
        const int set = s.channels == ChannelMode::separate ? f : 0;
        for (int k = 0; k <= s.node_order; ++k) {
          const double h = m.coeff(lag, k, 0, set);
          for (int i = 0; i < s.n_nodes; ++i) {
            const auto idx = static_cast<Eigen::Index>(i) * F + f;
            y[idx] += h * powers[k][idx];
          }
        }
      }
      return y;
    }
    case Family::PGVAR: return apply_product_shift_filter(*s.product, lag_taps(m, lag), x, opts);
    case Family::GPGVAR: return apply_product_filter(*s.node_graph, *s.feature_graph, lag_taps(m, lag), x, opts);
  }
  return {};
}

Eigen::MatrixXd dense_lag_matrix(const ModelParams& m, int lag) {
  const auto d = m.structure.dimension();
  if (m.structure.family == Family::VAR) return m.var_lags[lag - 1];
  Eigen::MatrixXd out(d, d);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    e[j] = 1.0;
    out.col(j) = apply_lag_filter(m, lag, e);
    e[j] = 0.0;
  }
  return out;
}

Eigen::VectorXd predict_one_step(const ModelParams& m, std::span<const Eigen::VectorXd> history,
                                 const ExecOptions& opts) {
  const auto& s = m.structure;
  require(static_cast<int>(history.size()) >= s.lag_order, ErrorCode::insufficient_data,
          "history has " + std::to_string(history.size()) + " steps, model needs " + std::to_string(s.lag_order));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(s.dimension());
  for (int p = 1; p <= s.lag_order; ++p) y -= apply_lag_filter(m, p, history[p - 1], opts);
  return y;
}

SignalSequence rollout(const ModelParams& m, const SignalSequence& seq, int t_start, int t_end, RolloutMode mode,
                       const ExecOptions& opts) {
  const auto& s = m.structure;
  require(seq.dimension() == s.dimension(), ErrorCode::dimension_mismatch, "sequence does not match model size");
  require(t_start >= s.lag_order, ErrorCode::invalid_parameter,
          "t_start = " + std::to_string(t_start) + " must be >= P = " + std::to_string(s.lag_order));
  require(t_start <= t_end && t_end <= seq.n_steps(), ErrorCode::invalid_parameter,
          "rollout range [" + std::to_string(t_start) + "," + std::to_string(t_end) + ") outside sequence of " +
              std::to_string(seq.n_steps()) + " steps");

  RowMatrix out(t_end - t_start, s.dimension());
  std::vector<Eigen::VectorXd> history(s.lag_order);
  for (int t = t_start; t < t_end; ++t) {
    for (int p = 1; p <= s.lag_order; ++p) {
      const int src = t - p;
      if (mode == RolloutMode::recursive && src >= t_start)
        history[p - 1] = out.row(src - t_start).transpose();
      else
        history[p - 1] = seq.step(src);
    }
    out.row(t - t_start) = predict_one_step(m, history, opts).transpose();
  }
  return SignalSequence(seq.n_nodes(), seq.n_features(), std::move(out));
}

ModelParams reduce_model(const ModelParams& m) {
  const auto& s = m.structure;
  if (s.family == Family::PGVAR) {
    const auto& op = *s.product;
    const bool cartesian = op.kind() == ProductKind::cartesian ||
                           (op.kind() == ProductKind::custom && op.terms() == preset_terms(ProductKind::cartesian));
    require(cartesian, ErrorCode::unsupported, "only cartesian PGVAR models reduce to GVAR");
    bool edgeless = true;
    for (const Edge& e : op.feature_graph().edges()) edgeless = edgeless && e.weight == 0.0;
    require(edgeless, ErrorCode::unsupported, "PGVAR reduces to GVAR only over an edgeless feature graph");
    auto out = ModelParams::zeros(
        ModelStructure::gvar(op.node_graph_ptr(), s.n_features, s.lag_order, s.node_order, ChannelMode::shared));
    out.coeffs = m.coeffs;
    return out;
  }
  if (s.family == Family::GPGVAR) {
    require(s.feature_order == 0, ErrorCode::unsupported, "GPGVAR reduces to GVAR only when L = 0");
    auto out = ModelParams::zeros(
        ModelStructure::gvar(s.node_graph, s.n_features, s.lag_order, s.node_order, ChannelMode::shared));
    out.coeffs = m.coeffs;
    return out;
  }
  fail(ErrorCode::unsupported, "reduce_model expects a PGVAR or GPGVAR model");
}

namespace {

void require_liftable(const ModelParams& gvar) {
  const auto& s = gvar.structure;
  require(s.family == Family::GVAR, ErrorCode::unsupported, "lift expects a GVAR model");
  require(s.coefficient_sets() == 1, ErrorCode::unsupported,
          "separate-channel GVAR with F > 1 has no single-filter product equivalent");
}

}  // namespace

ModelParams lift_to_pgvar(const ModelParams& gvar) {
  require_liftable(gvar);
  const auto& s = gvar.structure;
  auto feature = std::make_shared<const Graph>(edgeless_graph(s.n_features));
  auto op = make_product(s.node_graph, feature, ProductKind::cartesian);
  auto out = ModelParams::zeros(ModelStructure::pgvar(op, s.lag_order, s.node_order));
  out.coeffs = gvar.coeffs;
  return out;
}

ModelParams lift_to_gpgvar(const ModelParams& gvar) {
  require_liftable(gvar);
  const auto& s = gvar.structure;
  auto feature = std::make_shared<const Graph>(edgeless_graph(s.n_features));
  auto out = ModelParams::zeros(ModelStructure::gpgvar(s.node_graph, feature, s.lag_order, s.node_order, 0));
  out.coeffs = gvar.coeffs;
  return out;
}

}  // namespace pgvar
