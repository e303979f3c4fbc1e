// Serial reference vs OpenMP kernels. Arg 0 selects the backend
// (0 = serial, 1 = parallel), arg 1 is the node count.

#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "pgvar/filtering.hpp"
#include "pgvar/graph.hpp"
#include "pgvar/kernels.hpp"
#include "pgvar/product.hpp"

using namespace pgvar;

namespace {

Eigen::MatrixXd random_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd p(n, 3);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
  return p;
}

Eigen::VectorXd random_signal(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

Backend backend_of(const benchmark::State& state) { return state.range(0) == 0 ? Backend::serial : Backend::parallel; }

void BM_NodeShift(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  const auto g = normalize_shift(build_knn_graph(random_points(n, 1), 10));
  const auto x = random_signal(static_cast<Eigen::Index>(n) * 3, 2);
  Eigen::VectorXd y(x.size());
  const ExecOptions opts{backend_of(state)};
  for (auto _ : state) {
    node_shift(g, 3, {x.data(), static_cast<std::size_t>(x.size())}, {y.data(), static_cast<std::size_t>(y.size())},
               opts);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * g.edge_count() * 3);
}

void BM_FeatureShift(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  const auto f = normalize_shift(complete_graph(3));
  const auto x = random_signal(static_cast<Eigen::Index>(n) * 3, 3);
  Eigen::VectorXd y(x.size());
  const ExecOptions opts{backend_of(state)};
  for (auto _ : state) {
    feature_shift(f, n, {x.data(), static_cast<std::size_t>(x.size())}, {y.data(), static_cast<std::size_t>(y.size())},
                  opts);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * n * f.edge_count());
}

void BM_Knn(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  const auto p = random_points(n, 4);
  // Row-major copy for the kernel.
  std::vector<double> rows(static_cast<std::size_t>(n) * 3);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) rows[static_cast<std::size_t>(i) * 3 + c] = p(i, c);
  for (auto _ : state) {
    auto r = state.range(0) == 0 ? kernels::serial::knn_search(rows, n, 3, 10) : kernels::knn_search(rows, n, 3, 10);
    benchmark::DoNotOptimize(r.index.data());
  }
}

void BM_ProductShiftFilter(benchmark::State& state) {
  const int n = static_cast<int>(state.range(1));
  auto g = std::make_shared<const Graph>(normalize_shift(build_knn_graph(random_points(n, 5), 10)));
  auto f = std::make_shared<const Graph>(normalize_shift(complete_graph(3)));
  const auto op = make_product(g, f, ProductKind::cartesian);
  const auto h = FilterCoeffs::poly({0.5, -0.3, 0.2, 0.1});
  const auto x = random_signal(op.dimension(), 6);
  const ExecOptions opts{backend_of(state)};
  for (auto _ : state) {
    auto y = apply_product_shift_filter(op, h, x, opts);
    benchmark::DoNotOptimize(y.data());
  }
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int backend : {0, 1})
    for (int n : {251, 2000, 20000}) b->Args({backend, n});
}

void knn_sizes(benchmark::internal::Benchmark* b) {
  for (int backend : {0, 1})
    for (int n : {251, 2000}) b->Args({backend, n});
}

}  // namespace

BENCHMARK(BM_NodeShift)->Apply(sizes);
BENCHMARK(BM_FeatureShift)->Apply(sizes);
BENCHMARK(BM_ProductShiftFilter)->Apply(sizes);
BENCHMARK(BM_Knn)->Apply(knn_sizes);

BENCHMARK_MAIN();
