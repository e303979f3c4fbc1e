#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pgvar/exec.hpp"
#include "pgvar/graph.hpp"

namespace pgvar {

enum class ProductKind { cartesian, kronecker, strong, custom };

std::string_view to_string(ProductKind kind);
ProductKind parse_product_kind(std::string_view name);

// One term weight * (S^node_power kron S_F^feature_power), powers in {0, 1}.
struct ProductTerm {
  int node_power = 0;
  int feature_power = 0;
  double weight = 0.0;

  friend bool operator==(const ProductTerm&, const ProductTerm&) = default;
};

std::vector<ProductTerm> preset_terms(ProductKind kind);

// Lazy S_prod = sum_ij s_ij (S^i kron S_F^j) on node-major signals of
// length N*F. The NF x NF matrix is never formed.
class ProductShiftOperator {
 public:
  ProductShiftOperator(std::shared_ptr<const Graph> node_graph,
                       std::shared_ptr<const Graph> feature_graph, ProductKind kind,
                       std::vector<ProductTerm> terms);

  int n_nodes() const { return node_->n_nodes(); }
  int n_features() const { return feature_->n_nodes(); }
  std::int64_t dimension() const { return static_cast<std::int64_t>(n_nodes()) * n_features(); }

  const Graph& node_graph() const { return *node_; }
  const Graph& feature_graph() const { return *feature_; }
  const std::shared_ptr<const Graph>& node_graph_ptr() const { return node_; }
  const std::shared_ptr<const Graph>& feature_graph_ptr() const { return feature_; }
  ProductKind kind() const { return kind_; }
  const std::vector<ProductTerm>& terms() const { return terms_; }

  // y = S_prod x. `scratch` must hold 2 * dimension() doubles.
  void apply(std::span<const double> x, std::span<double> y, std::span<double> scratch,
             const ExecOptions& opts = {}) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x, const ExecOptions& opts = {}) const;

 private:
  std::shared_ptr<const Graph> node_;
  std::shared_ptr<const Graph> feature_;
  ProductKind kind_;
  std::vector<ProductTerm> terms_;
};

// `custom_terms` is only read for ProductKind::custom.
ProductShiftOperator make_product(std::shared_ptr<const Graph> node_graph,
                                  std::shared_ptr<const Graph> feature_graph, ProductKind kind,
                                  std::vector<ProductTerm> custom_terms = {});

// F|E| + N|E_F| over stored directed entries. Cartesian only.
std::int64_t product_edge_count(const ProductShiftOperator& op);

}  // namespace pgvar
