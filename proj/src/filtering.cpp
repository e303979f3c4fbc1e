#include "pgvar/filtering.hpp"

#include <string>

#include "pgvar/error.hpp"

namespace pgvar {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void check_length(const Eigen::VectorXd& x, Eigen::Index expected, const char* what) {
  require(x.size() == expected, ErrorCode::dimension_mismatch,
          std::string(what) + ": expected length " + std::to_string(expected) + ", got " +
              std::to_string(x.size()));
}

}  // namespace

FilterCoeffs::FilterCoeffs(Eigen::MatrixXd taps) : taps_(std::move(taps)) {
  require(taps_.rows() >= 1 && taps_.cols() >= 1, ErrorCode::invalid_parameter, "filter needs at least one tap");
  require(taps_.allFinite(), ErrorCode::invalid_parameter, "non-finite filter coefficient");
}

FilterCoeffs FilterCoeffs::poly(const std::vector<double>& h) {
  require(!h.empty(), ErrorCode::invalid_parameter, "filter needs at least one tap");
  return FilterCoeffs(Eigen::Map<const Eigen::MatrixXd>(h.data(), static_cast<Eigen::Index>(h.size()), 1));
}

Eigen::VectorXd apply_shift(const Graph& g, const Eigen::VectorXd& x, const ExecOptions& opts) {
  check_length(x, g.n_nodes(), "apply_shift");
  Eigen::VectorXd y(x.size());
  node_shift(g, 1, view(x), view(y), opts);
  return y;
}

Eigen::VectorXd apply_poly_filter(const Graph& g, const FilterCoeffs& h, const Eigen::VectorXd& x,
                                  const ExecOptions& opts) {
  check_length(x, g.n_nodes(), "apply_poly_filter");
  require(h.feature_order() == 0, ErrorCode::invalid_parameter, "polynomial filter takes a single tap column");
  Eigen::VectorXd y = h(0) * x;
  Eigen::VectorXd z = x;
  Eigen::VectorXd next(x.size());
  for (int k = 1; k <= h.node_order(); ++k) {
    node_shift(g, 1, view(z), view(next), opts);
    z.swap(next);
    y += h(k) * z;
  }
  return y;
}

Eigen::VectorXd apply_product_filter(const Graph& node_graph, const Graph& feature_graph, const FilterCoeffs& h,
                                     const Eigen::VectorXd& x, const ExecOptions& opts) {
  const int n = node_graph.n_nodes();
  const int f = feature_graph.n_nodes();
  check_length(x, static_cast<Eigen::Index>(n) * f, "apply_product_filter");
  const int K = h.node_order();
  const int L = h.feature_order();

  // Row-shift stack W_l = S_F^l Y.
  std::vector<Eigen::VectorXd> stack;
  stack.reserve(L + 1);
  stack.push_back(x);
  for (int l = 1; l <= L; ++l) {
    Eigen::VectorXd next(x.size());
    feature_shift(feature_graph, n, view(stack.back()), view(next), opts);
    stack.push_back(std::move(next));
  }

  // Horner over node powers: V = U_K; V <- V S^T + U_k, U_k = sum_l h_kl W_l.
  auto combine = [&](int k) {
    Eigen::VectorXd u = h(k, 0) * stack[0];
    for (int l = 1; l <= L; ++l) u += h(k, l) * stack[l];
    return u;
  };
  Eigen::VectorXd v = combine(K);
  Eigen::VectorXd shifted(x.size());
  for (int k = K - 1; k >= 0; --k) {
    node_shift(node_graph, f, view(v), view(shifted), opts);
    v = shifted + combine(k);
  }
  return v;
}

Eigen::VectorXd apply_product_shift_filter(const ProductShiftOperator& op, const FilterCoeffs& h,
                                           const Eigen::VectorXd& x, const ExecOptions& opts) {
  check_length(x, op.dimension(), "apply_product_shift_filter");
  require(h.feature_order() == 0, ErrorCode::invalid_parameter, "product-shift filter takes a single tap column");
  std::vector<double> scratch(2 * static_cast<std::size_t>(x.size()));
  Eigen::VectorXd y = h(0) * x;
  Eigen::VectorXd z = x;
  Eigen::VectorXd next(x.size());
  for (int k = 1; k <= h.node_order(); ++k) {
    op.apply(view(z), view(next), scratch, opts);
    z.swap(next);
    y += h(k) * z;
  }
  return y;
}

std::vector<Eigen::VectorXd> node_shift_powers(const Graph& g, int n_features, const Eigen::VectorXd& x,
                                               int max_power, const ExecOptions& opts) {
  check_length(x, static_cast<Eigen::Index>(g.n_nodes()) * n_features, "node_shift_powers");
  std::vector<Eigen::VectorXd> out;
  out.reserve(max_power + 1);
  out.push_back(x);
  for (int k = 1; k <= max_power; ++k) {
    Eigen::VectorXd next(x.size());
    node_shift(g, n_features, view(out.back()), view(next), opts);
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<Eigen::VectorXd> product_shift_powers(const ProductShiftOperator& op, const Eigen::VectorXd& x,
                                                  int max_power, const ExecOptions& opts) {
  check_length(x, op.dimension(), "product_shift_powers");
  std::vector<double> scratch(2 * static_cast<std::size_t>(x.size()));
  std::vector<Eigen::VectorXd> out;
  out.reserve(max_power + 1);
  out.push_back(x);
  for (int k = 1; k <= max_power; ++k) {
    Eigen::VectorXd next(x.size());
    op.apply(view(out.back()), view(next), scratch, opts);
    out.push_back(std::move(next));
  }
  return out;
}

std::vector<Eigen::VectorXd> kronecker_shift_powers(const Graph& node_graph, const Graph& feature_graph,
                                                    const Eigen::VectorXd& x, int max_node_power,
                                                    int max_feature_power, const ExecOptions& opts) {
  const int n = node_graph.n_nodes();
  const int f = feature_graph.n_nodes();
  check_length(x, static_cast<Eigen::Index>(n) * f, "kronecker_shift_powers");
  const int width = max_feature_power + 1;
  std::vector<Eigen::VectorXd> out((max_node_power + 1) * width);
  out[0] = x;
  for (int l = 1; l <= max_feature_power; ++l) {
    out[l].resize(x.size());
    feature_shift(feature_graph, n, view(out[l - 1]), view(out[l]), opts);
  }
  for (int k = 1; k <= max_node_power; ++k) {
    for (int l = 0; l <= max_feature_power; ++l) {
      auto& dst = out[k * width + l];
      dst.resize(x.size());
      node_shift(node_graph, f, view(out[(k - 1) * width + l]), view(dst), opts);
    }
  }
  return out;
}

}  // namespace pgvar
