#include "pgvar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pgvar::kernels {

namespace {

inline void node_shift_row(const CsrView& s, int width, std::span<const double> in,
                           std::span<double> out, std::int64_t i) {
  double* dst = out.data() + i * width;
  std::fill(dst, dst + width, 0.0);
  for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
    const double w = s.val[e];
    const double* src = in.data() + static_cast<std::int64_t>(s.col[e]) * width;
    for (int f = 0; f < width; ++f) dst[f] += w * src[f];
  }
}

inline void feature_shift_column(const CsrView& sf, std::span<const double> in,
                                 std::span<double> out, std::int64_t c) {
  const std::int64_t width = sf.n_rows;
  const double* src = in.data() + c * width;
  double* dst = out.data() + c * width;
  for (std::int64_t r = 0; r < width; ++r) {
    double acc = 0.0;
    for (std::int64_t e = sf.row_ptr[r]; e < sf.row_ptr[r + 1]; ++e) acc += sf.val[e] * src[sf.col[e]];
    dst[r] = acc;
  }
}

inline void knn_row(std::span<const double> points, std::int64_t n, int dim, int k, std::int64_t i,
                    std::vector<std::pair<double, int>>& scratch, KnnResult& result) {
  scratch.clear();
  const double* pi = points.data() + i * dim;
  for (std::int64_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double* pj = points.data() + j * dim;
    double d2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double diff = pi[c] - pj[c];
      d2 += diff * diff;
    }
    scratch.emplace_back(d2, static_cast<int>(j));
  }
  std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end());
  for (int r = 0; r < k; ++r) {
    result.index[i * k + r] = scratch[r].second;
    result.distance[i * k + r] = std::sqrt(scratch[r].first);
  }
}

}  // namespace

void node_shift(const CsrView& s, int width, std::span<const double> in, std::span<double> out,
                ShiftCounter* counter) {
  const std::int64_t n = s.n_rows;
#pragma omp parallel for schedule(static) if (n >= kParallelRowThreshold)
  for (std::int64_t i = 0; i < n; ++i) node_shift_row(s, width, in, out, i);
  if (counter) counter->multiply_adds += static_cast<std::uint64_t>(s.nnz()) * width;
}

void feature_shift(const CsrView& sf, std::int64_t n_columns, std::span<const double> in,
                   std::span<double> out, ShiftCounter* counter) {
#pragma omp parallel for schedule(static) if (n_columns >= kParallelRowThreshold)
  for (std::int64_t c = 0; c < n_columns; ++c) feature_shift_column(sf, in, out, c);
  if (counter) counter->multiply_adds += static_cast<std::uint64_t>(sf.nnz()) * n_columns;
}

KnnResult knn_search(std::span<const double> points, std::int64_t n, int dim, int k) {
  KnnResult result{std::vector<int>(n * k), std::vector<double>(n * k)};
#pragma omp parallel if (n >= kParallelRowThreshold)
  {
    std::vector<std::pair<double, int>> scratch;
    scratch.reserve(n);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) knn_row(points, n, dim, k, i, scratch, result);
  }
  return result;
}

namespace serial {

// Counts every multiply-add individually; the parallel path adds the
// closed-form total instead, and tests check the two agree.
void node_shift(const CsrView& s, int width, std::span<const double> in, std::span<double> out,
                ShiftCounter* counter) {
  std::uint64_t ops = 0;
  for (std::int64_t i = 0; i < s.n_rows; ++i) {
    double* dst = out.data() + i * width;
    for (int f = 0; f < width; ++f) dst[f] = 0.0;
    for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
      const double* src = in.data() + static_cast<std::int64_t>(s.col[e]) * width;
      for (int f = 0; f < width; ++f) {
        dst[f] += s.val[e] * src[f];
        ++ops;
      }
    }
  }
  if (counter) counter->multiply_adds += ops;
}

void feature_shift(const CsrView& sf, std::int64_t n_columns, std::span<const double> in,
                   std::span<double> out, ShiftCounter* counter) {
  std::uint64_t ops = 0;
  const std::int64_t width = sf.n_rows;
  for (std::int64_t c = 0; c < n_columns; ++c) {
    for (std::int64_t r = 0; r < width; ++r) {
      double acc = 0.0;
      for (std::int64_t e = sf.row_ptr[r]; e < sf.row_ptr[r + 1]; ++e) {
        acc += sf.val[e] * in[c * width + sf.col[e]];
        ++ops;
      }
      out[c * width + r] = acc;
    }
  }
  if (counter) counter->multiply_adds += ops;
}

KnnResult knn_search(std::span<const double> points, std::int64_t n, int dim, int k) {
  KnnResult result{std::vector<int>(n * k), std::vector<double>(n * k)};
  std::vector<std::pair<double, int>> scratch;
  scratch.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) knn_row(points, n, dim, k, i, scratch, result);
  return result;
}

}  // namespace serial

}  // namespace pgvar::kernels
