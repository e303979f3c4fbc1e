#pragma once

#include <span>

#include "pgvar/graph.hpp"
#include "pgvar/kernels.hpp"

namespace pgvar {

enum class Backend { parallel, serial };

struct ExecOptions {
  Backend backend = Backend::parallel;
  kernels::ShiftCounter* counter = nullptr;
};

// Z = Y S^T on an F x N column-major block (shift every node signal
// across the node graph).
inline void node_shift(const Graph& g, int width, std::span<const double> in, std::span<double> out,
                       const ExecOptions& opts) {
  if (opts.backend == Backend::serial)
    kernels::serial::node_shift(g.csr(), width, in, out, opts.counter);
  else
    kernels::node_shift(g.csr(), width, in, out, opts.counter);
}

// Z = S_F Y on an F x N column-major block.
inline void feature_shift(const Graph& g, std::int64_t n_columns, std::span<const double> in,
                          std::span<double> out, const ExecOptions& opts) {
  if (opts.backend == Backend::serial)
    kernels::serial::feature_shift(g.csr(), n_columns, in, out, opts.counter);
  else
    kernels::feature_shift(g.csr(), n_columns, in, out, opts.counter);
}

}  // namespace pgvar
