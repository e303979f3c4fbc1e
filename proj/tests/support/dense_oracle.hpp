#pragma once

// Dense reference constructions used as test oracles. Nothing here calls the
// library's filtering, product or model code; graphs enter only through their
// edge lists.

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pgvar/graph.hpp"

namespace oracle {

inline Eigen::MatrixXd dense(const pgvar::Graph& g) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.n_nodes(), g.n_nodes());
  for (const auto& e : g.edges()) m(e.src, e.dst) = e.weight;
  return m;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Eigen::MatrixXd power(const Eigen::MatrixXd& a, int k) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

struct Term {
  int i;
  int j;
  double s;
};

// sum s_ij S^i kron S_F^j, node index outer, feature index inner.
inline Eigen::MatrixXd product_matrix(const Eigen::MatrixXd& s, const Eigen::MatrixXd& sf,
                                      const std::vector<Term>& terms) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.rows() * sf.rows(), s.cols() * sf.cols());
  for (const auto& t : terms) out += t.s * kron(power(s, t.i), power(sf, t.j));
  return out;
}

inline std::vector<Term> cartesian() { return {{1, 0, 1.0}, {0, 1, 1.0}}; }
inline std::vector<Term> kronecker() { return {{1, 1, 1.0}}; }
inline std::vector<Term> strong() { return {{1, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}}; }

// sum_k h_k A^k.
inline Eigen::MatrixXd poly(const Eigen::MatrixXd& a, const std::vector<double>& h) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (std::size_t k = 0; k < h.size(); ++k) out += h[k] * power(a, static_cast<int>(k));
  return out;
}

// sum_{k,l} h(k,l) S^k kron S_F^l.
inline Eigen::MatrixXd bivariate(const Eigen::MatrixXd& s, const Eigen::MatrixXd& sf, const Eigen::MatrixXd& h) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.rows() * sf.rows(), s.cols() * sf.cols());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    for (Eigen::Index l = 0; l < h.cols(); ++l)
      out += h(k, l) * kron(power(s, static_cast<int>(k)), power(sf, static_cast<int>(l)));
  return out;
}

// Random sparse weighted matrix with at least one nonzero, optionally
// symmetric, with entries in [-1, 1] (or 1 when binary).
inline Eigen::MatrixXd random_adjacency(std::mt19937_64& rng, int n, double density, bool symmetric,
                                        bool self_loops = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0), w(-1.0, 1.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = symmetric ? i : 0; j < n; ++j) {
      if (i == j && !self_loops) continue;
      if (u(rng) < density) {
        m(i, j) = w(rng);
        if (symmetric) m(j, i) = m(i, j);
      }
    }
  }
  if (m.cwiseAbs().sum() == 0.0) {
    const int i = 0;
    const int j = n > 1 ? 1 : 0;
    m(i, j) = 0.5;
    if (symmetric) m(j, i) = 0.5;
  }
  return m;
}

inline std::shared_ptr<const pgvar::Graph> graph_of(const Eigen::MatrixXd& m) {
  std::vector<pgvar::Edge> edges;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) edges.push_back({i, j, m(i, j)});
  return std::make_shared<const pgvar::Graph>(pgvar::Graph::from_edges(static_cast<int>(m.rows()), edges));
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

inline double max_abs(const Eigen::MatrixXd& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Largest singular value by full SVD.
inline double spectral_norm(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace oracle
