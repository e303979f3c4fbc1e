#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pgvar/exec.hpp"
#include "pgvar/graph.hpp"
#include "pgvar/product.hpp"

namespace pgvar {

// Filter taps h(k, l) for k = 0..K (node-shift power) and l = 0..L
// (feature-shift power). Plain polynomial filters have L = 0.
class FilterCoeffs {
 public:
  FilterCoeffs() = default;
  explicit FilterCoeffs(Eigen::MatrixXd taps);

  static FilterCoeffs poly(const std::vector<double>& h);

  int node_order() const { return static_cast<int>(taps_.rows()) - 1; }
  int feature_order() const { return static_cast<int>(taps_.cols()) - 1; }
  double operator()(int k, int l = 0) const { return taps_(k, l); }
  const Eigen::MatrixXd& taps() const { return taps_; }

 private:
  Eigen::MatrixXd taps_ = Eigen::MatrixXd::Ones(1, 1);
};

// y = S x.
Eigen::VectorXd apply_shift(const Graph& g, const Eigen::VectorXd& x, const ExecOptions& opts = {});

// y = sum_k h_k S^k x by iterated shifts; K|E| multiply-adds.
Eigen::VectorXd apply_poly_filter(const Graph& g, const FilterCoeffs& h, const Eigen::VectorXd& x,
                                  const ExecOptions& opts = {});

// y = sum_{k,l} h_kl (S^k kron S_F^l) x, evaluated as
// vec(sum_{k,l} h_kl S_F^l Y (S^k)^T) with Y = reshape_to_matrix(x).
Eigen::VectorXd apply_product_filter(const Graph& node_graph, const Graph& feature_graph, const FilterCoeffs& h,
                                     const Eigen::VectorXd& x, const ExecOptions& opts = {});

// y = sum_k h_k S_prod^k x by iterated application of the lazy operator.
Eigen::VectorXd apply_product_shift_filter(const ProductShiftOperator& op, const FilterCoeffs& h,
                                           const Eigen::VectorXd& x, const ExecOptions& opts = {});

// Shift bases used as regressors and by the model recursions. Each returns
// one vector per power, in order.

// (S^k kron I_F) x for k = 0..K on a node-major signal with `n_features` channels.
std::vector<Eigen::VectorXd> node_shift_powers(const Graph& g, int n_features, const Eigen::VectorXd& x,
                                               int max_power, const ExecOptions& opts = {});

// S_prod^k x for k = 0..K.
std::vector<Eigen::VectorXd> product_shift_powers(const ProductShiftOperator& op, const Eigen::VectorXd& x,
                                                  int max_power, const ExecOptions& opts = {});

// (S^k kron S_F^l) x, index k * (L + 1) + l.
std::vector<Eigen::VectorXd> kronecker_shift_powers(const Graph& node_graph, const Graph& feature_graph,
                                                    const Eigen::VectorXd& x, int max_node_power,
                                                    int max_feature_power, const ExecOptions& opts = {});

}  // namespace pgvar
