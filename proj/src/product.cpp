#include "pgvar/product.hpp"

#include <algorithm>
#include <cmath>

#include "pgvar/error.hpp"

namespace pgvar {

std::string_view to_string(ProductKind kind) {
  switch (kind) {
    case ProductKind::cartesian: return "cartesian";
    case ProductKind::kronecker: return "kronecker";
    case ProductKind::strong: return "strong";
    case ProductKind::custom: return "custom";
  }
  return "custom";
}

ProductKind parse_product_kind(std::string_view name) {
  if (name == "cartesian") return ProductKind::cartesian;
  if (name == "kronecker") return ProductKind::kronecker;
  if (name == "strong") return ProductKind::strong;
  if (name == "custom") return ProductKind::custom;
  fail(ErrorCode::invalid_parameter, "unknown product kind '" + std::string(name) + "'");
}

std::vector<ProductTerm> preset_terms(ProductKind kind) {
  switch (kind) {
    case ProductKind::cartesian: return {{1, 0, 1.0}, {0, 1, 1.0}};
    case ProductKind::kronecker: return {{1, 1, 1.0}};
    case ProductKind::strong: return {{1, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}};
    case ProductKind::custom: break;
  }
  fail(ErrorCode::invalid_parameter, "custom products have no preset terms");
}

ProductShiftOperator::ProductShiftOperator(std::shared_ptr<const Graph> node_graph,
                                           std::shared_ptr<const Graph> feature_graph,
                                           ProductKind kind, std::vector<ProductTerm> terms)
    : node_(std::move(node_graph)), feature_(std::move(feature_graph)), kind_(kind), terms_(std::move(terms)) {
  require(node_ && node_->n_nodes() > 0, ErrorCode::invalid_input, "product needs a non-empty node graph");
  require(feature_ && feature_->n_nodes() > 0, ErrorCode::invalid_input,
          "product needs a non-empty feature graph");
  for (const ProductTerm& t : terms_) {
    require((t.node_power == 0 || t.node_power == 1) && (t.feature_power == 0 || t.feature_power == 1),
            ErrorCode::invalid_parameter, "product term powers must be 0 or 1");
    require(std::isfinite(t.weight), ErrorCode::invalid_parameter, "non-finite product term weight");
  }
}

void ProductShiftOperator::apply(std::span<const double> x, std::span<double> y,
                                 std::span<double> scratch, const ExecOptions& opts) const {
  const auto dim = static_cast<std::size_t>(dimension());
  require(x.size() == dim && y.size() == dim, ErrorCode::dimension_mismatch,
          "product operator expects vectors of length " + std::to_string(dim));
  require(scratch.size() >= 2 * dim, ErrorCode::dimension_mismatch, "product scratch too small");
  const int width = n_features();
  const std::int64_t columns = n_nodes();
  auto tmp = scratch.subspan(0, dim);
  auto tmp2 = scratch.subspan(dim, dim);

  std::fill(y.begin(), y.end(), 0.0);
  for (const ProductTerm& t : terms_) {
    std::span<const double> term;
    if (t.node_power == 0 && t.feature_power == 0) {
      term = x;
    } else if (t.node_power == 1 && t.feature_power == 0) {
      node_shift(*node_, width, x, tmp, opts);
      term = tmp;
    } else if (t.node_power == 0) {
      feature_shift(*feature_, columns, x, tmp, opts);
      term = tmp;
    } else {
      feature_shift(*feature_, columns, x, tmp, opts);
      node_shift(*node_, width, tmp, tmp2, opts);
      term = tmp2;
    }
    for (std::size_t i = 0; i < dim; ++i) y[i] += t.weight * term[i];
  }
}

Eigen::VectorXd ProductShiftOperator::apply(const Eigen::VectorXd& x, const ExecOptions& opts) const {
  require(x.size() == dimension(), ErrorCode::dimension_mismatch,
          "product operator expects vectors of length " + std::to_string(dimension()));
  Eigen::VectorXd y(x.size());
  std::vector<double> scratch(2 * static_cast<std::size_t>(x.size()));
  apply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()), scratch, opts);
  return y;
}

ProductShiftOperator make_product(std::shared_ptr<const Graph> node_graph,
                                  std::shared_ptr<const Graph> feature_graph, ProductKind kind,
                                  std::vector<ProductTerm> custom_terms) {
  require(kind != ProductKind::custom || !custom_terms.empty(), ErrorCode::invalid_parameter,
          "custom product needs at least one term");
  auto terms = kind == ProductKind::custom ? std::move(custom_terms) : preset_terms(kind);
  return ProductShiftOperator(std::move(node_graph), std::move(feature_graph), kind, std::move(terms));
}

std::int64_t product_edge_count(const ProductShiftOperator& op) {
  require(op.kind() == ProductKind::cartesian, ErrorCode::unsupported,
          "edge count formula is defined for the cartesian product only");
  return static_cast<std::int64_t>(op.n_features()) * op.node_graph().edge_count() +
         static_cast<std::int64_t>(op.n_nodes()) * op.feature_graph().edge_count();
}

}  // namespace pgvar
