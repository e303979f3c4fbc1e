#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "pgvar/kernels.hpp"

namespace pgvar {

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Sparse graph shift operator S. Entry (src, dst) is [S]_{src,dst}, so
// y = S x aggregates at node i over the stored row i. Immutable after
// construction.
class Graph {
 public:
  Graph() = default;

  // Validates indices and weights and rejects duplicate (src, dst) pairs.
  static Graph from_edges(int n_nodes, std::vector<Edge> edges);
  // Stores every nonzero entry of a square matrix. Meant for small graphs.
  static Graph from_dense(const Eigen::MatrixXd& matrix);

  int n_nodes() const { return n_nodes_; }
  // Stored directed entries, self-loops included.
  std::int64_t edge_count() const { return static_cast<std::int64_t>(col_.size()); }
  bool is_symmetric() const { return symmetric_; }

  double weight(int src, int dst) const;
  std::vector<Edge> edges() const;
  kernels::CsrView csr() const;

  Graph scaled(double factor) const;
  Eigen::MatrixXd to_dense() const;

 private:
  int n_nodes_ = 0;
  bool symmetric_ = true;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> val_;
};

enum class KnnWeighting { binary, gaussian };

// Directed k-nearest-neighbour graph over the rows of `points` (N x D),
// symmetrised by union with the larger weight kept. Gaussian weights use
// exp(-d^2 / sigma^2) with sigma the mean kNN distance.
Graph build_knn_graph(const Eigen::MatrixXd& points, int k,
                      KnnWeighting weighting = KnnWeighting::gaussian);

// Largest singular value of S from power iteration on S^T S.
double spectral_norm_estimate(const Graph& g, double tol = 1e-12, int max_iter = 10000);

// Scales g to unit spectral norm.
Graph normalize_shift(const Graph& g, double tol = 1e-12, int max_iter = 10000);

// Standard topologies, mostly for feature graphs.
Graph complete_graph(int n);
Graph path_graph(int n);
Graph ring_graph(int n);
Graph edgeless_graph(int n);

// Edge-list CSV: header `src,dst,weight`, one directed entry per row.
Graph load_edge_list(const std::filesystem::path& path, int n_nodes = -1);
void save_edge_list(const Graph& g, const std::filesystem::path& path);

// Point-cloud CSV: header `node,c1,...,cD`, rows in node order.
Eigen::MatrixXd load_points(const std::filesystem::path& path);
void save_points(const Eigen::MatrixXd& points, const std::filesystem::path& path);

}  // namespace pgvar
