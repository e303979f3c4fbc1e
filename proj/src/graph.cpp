#include "pgvar/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "pgvar/error.hpp"

namespace pgvar {

Graph Graph::from_edges(int n_nodes, std::vector<Edge> edges) {
  require(n_nodes > 0, ErrorCode::invalid_parameter, "graph needs at least one node");
  for (const Edge& e : edges) {
    require(e.src >= 0 && e.src < n_nodes && e.dst >= 0 && e.dst < n_nodes,
            ErrorCode::invalid_input,
            "edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                ") out of range for " + std::to_string(n_nodes) + " nodes");
    require(std::isfinite(e.weight), ErrorCode::invalid_input,
            "non-finite weight on edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                ")");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    require(edges[i].src != edges[i - 1].src || edges[i].dst != edges[i - 1].dst,
            ErrorCode::invalid_input,
            "duplicate edge (" + std::to_string(edges[i].src) + "," +
                std::to_string(edges[i].dst) + ")");
  }

  Graph g;
  g.n_nodes_ = n_nodes;
  g.row_ptr_.assign(n_nodes + 1, 0);
  g.col_.reserve(edges.size());
  g.val_.reserve(edges.size());
  for (const Edge& e : edges) {
    ++g.row_ptr_[e.src + 1];
    g.col_.push_back(e.dst);
    g.val_.push_back(e.weight);
  }
  for (int i = 0; i < n_nodes; ++i) g.row_ptr_[i + 1] += g.row_ptr_[i];

  g.symmetric_ = true;
  for (const Edge& e : edges) {
    if (e.src != e.dst && g.weight(e.dst, e.src) != e.weight) {
      g.symmetric_ = false;
      break;
    }
  }
  return g;
}

Graph Graph::from_dense(const Eigen::MatrixXd& matrix) {
  require(matrix.rows() == matrix.cols(), ErrorCode::invalid_shape, "shift matrix must be square");
  std::vector<Edge> edges;
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j)
      if (matrix(i, j) != 0.0) edges.push_back({i, j, matrix(i, j)});
  return from_edges(static_cast<int>(matrix.rows()), std::move(edges));
}

double Graph::weight(int src, int dst) const {
  const auto first = col_.begin() + row_ptr_[src];
  const auto last = col_.begin() + row_ptr_[src + 1];
  const auto it = std::lower_bound(first, last, dst);
  if (it == last || *it != dst) return 0.0;
  return val_[it - col_.begin()];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(col_.size());
  for (int i = 0; i < n_nodes_; ++i)
    for (std::int64_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) out.push_back({i, col_[e], val_[e]});
  return out;
}

kernels::CsrView Graph::csr() const {
  return kernels::CsrView{n_nodes_, row_ptr_, col_, val_};
}

Graph Graph::scaled(double factor) const {
  require(std::isfinite(factor), ErrorCode::invalid_parameter, "non-finite scale factor");
  Graph g = *this;
  for (double& v : g.val_) v *= factor;
  return g;
}

Eigen::MatrixXd Graph::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_nodes_, n_nodes_);
  for (int i = 0; i < n_nodes_; ++i)
    for (std::int64_t e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) m(i, col_[e]) = val_[e];
  return m;
}

Graph build_knn_graph(const Eigen::MatrixXd& points, int k, KnnWeighting weighting) {
  const auto n = points.rows();
  const int dim = static_cast<int>(points.cols());
  require(k > 0, ErrorCode::invalid_parameter, "k must be positive");
  require(dim >= 1, ErrorCode::invalid_input, "points need at least one coordinate");
  require(k < n, ErrorCode::invalid_parameter,
          "k = " + std::to_string(k) + " needs at least k+1 points, got " + std::to_string(n));
  require(points.allFinite(), ErrorCode::invalid_input, "non-finite coordinate in point cloud");

  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = points;
  const auto knn = kernels::knn_search(std::span<const double>(rows.data(), rows.size()), n, dim, k);

  double sigma = 0.0;
  for (double d : knn.distance) sigma += d;
  sigma /= static_cast<double>(knn.distance.size());

  auto weight_of = [&](double d) {
    if (weighting == KnnWeighting::binary || sigma == 0.0) return 1.0;
    return std::exp(-(d * d) / (sigma * sigma));
  };

  std::map<std::pair<int, int>, double> merged;
  auto put = [&](int a, int b, double w) {
    auto [it, inserted] = merged.try_emplace({a, b}, w);
    if (!inserted) it->second = std::max(it->second, w);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int r = 0; r < k; ++r) {
      const int j = knn.index[i * k + r];
      const double w = weight_of(knn.distance[i * k + r]);
      put(static_cast<int>(i), j, w);
      put(j, static_cast<int>(i), w);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(merged.size());
  for (const auto& [key, w] : merged) edges.push_back({key.first, key.second, w});
  return Graph::from_edges(static_cast<int>(n), std::move(edges));
}

double spectral_norm_estimate(const Graph& g, double tol, int max_iter) {
  require(tol > 0.0, ErrorCode::invalid_parameter, "tolerance must be positive");
  require(max_iter > 0, ErrorCode::invalid_parameter, "max_iter must be positive");
  const int n = g.n_nodes();
  const Eigen::MatrixXd::Index size = n;

  // A constant start vector can sit in the null space (Laplacians), so
  // start from a fixed pseudo-random direction.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  Eigen::VectorXd v(size);
  for (auto i = 0; i < n; ++i) v[i] = unif(rng);
  v.normalize();

  const auto s = g.csr();
  Eigen::VectorXd sv(size), stsv(size);
  // S^T y computed as a scatter over the rows of S.
  auto transpose_apply = [&](const Eigen::VectorXd& y, Eigen::VectorXd& out) {
    out.setZero();
    for (int i = 0; i < n; ++i)
      for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) out[s.col[e]] += s.val[e] * y[i];
  };

  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    kernels::spmv(s, std::span<const double>(v.data(), size), std::span<double>(sv.data(), size));
    const double next = sv.norm();
    if (next == 0.0) return 0.0;
    transpose_apply(sv, stsv);
    const double len = stsv.norm();
    if (len == 0.0) return next;
    v = stsv / len;
    const bool converged = it > 0 && std::abs(next - sigma) <= tol * next;
    sigma = next;
    if (converged) break;
  }
  return sigma;
}

Graph normalize_shift(const Graph& g, double tol, int max_iter) {
  require(g.edge_count() > 0, ErrorCode::degenerate_graph, "cannot normalise a graph with no edges");
  const double sigma = spectral_norm_estimate(g, tol, max_iter);
  require(sigma > 0.0, ErrorCode::degenerate_graph, "shift operator is numerically zero");
  return g.scaled(1.0 / sigma);
}

Graph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) edges.push_back({i, j, 1.0});
  return Graph::from_edges(n, std::move(edges));
}

Graph path_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) {
    edges.push_back({i, i + 1, 1.0});
    edges.push_back({i + 1, i, 1.0});
  }
  return Graph::from_edges(n, std::move(edges));
}

Graph ring_graph(int n) {
  if (n < 3) return path_graph(n);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    edges.push_back({i, j, 1.0});
    edges.push_back({j, i, 1.0});
  }
  return Graph::from_edges(n, std::move(edges));
}

Graph edgeless_graph(int n) { return Graph::from_edges(n, {}); }

}  // namespace pgvar
