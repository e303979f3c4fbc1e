#pragma once

// Low-level sparse kernels behind graph shifts. Each kernel has an
// OpenMP-parallel version (the default path) and a serial reference in
// `kernels::serial` that tests compare against and the benchmark times.

#include <cstdint>
#include <span>
#include <vector>

namespace pgvar::kernels {

// Read-only compressed-sparse-row view. Columns within a row are sorted.
struct CsrView {
  std::int64_t n_rows = 0;
  std::span<const std::int64_t> row_ptr;  // n_rows + 1
  std::span<const int> col;
  std::span<const double> val;

  std::int64_t nnz() const { return n_rows == 0 ? 0 : row_ptr[n_rows]; }
};

// Multiply-adds executed inside shift kernels. Identity and scaling work
// is not counted.
struct ShiftCounter {
  std::uint64_t multiply_adds = 0;
};

// Rows below this count run serially even on the parallel path.
inline constexpr std::int64_t kParallelRowThreshold = 256;

// Column-shift of an F x N column-major block: out(:, i) = sum_j S_ij in(:, j).
// width = F. With width 1 this is y = S x.
void node_shift(const CsrView& s, int width, std::span<const double> in, std::span<double> out,
                ShiftCounter* counter = nullptr);

// Row-shift applied to every column of an F x N column-major block:
// out(:, i) = S_F in(:, i).
void feature_shift(const CsrView& sf, std::int64_t n_columns, std::span<const double> in,
                   std::span<double> out, ShiftCounter* counter = nullptr);

inline void spmv(const CsrView& a, std::span<const double> x, std::span<double> y,
                 ShiftCounter* counter = nullptr) {
  node_shift(a, 1, x, y, counter);
}

// Brute-force k nearest neighbours of every row of a row-major n x dim
// point array (self excluded). Ties resolve to the lower index.
// Returns n*k neighbour indices and matching Euclidean distances.
struct KnnResult {
  std::vector<int> index;
  std::vector<double> distance;
};
KnnResult knn_search(std::span<const double> points, std::int64_t n, int dim, int k);

namespace serial {

void node_shift(const CsrView& s, int width, std::span<const double> in, std::span<double> out,
                ShiftCounter* counter = nullptr);
void feature_shift(const CsrView& sf, std::int64_t n_columns, std::span<const double> in,
                   std::span<double> out, ShiftCounter* counter = nullptr);
KnnResult knn_search(std::span<const double> points, std::int64_t n, int dim, int k);

}  // namespace serial

}  // namespace pgvar::kernels
