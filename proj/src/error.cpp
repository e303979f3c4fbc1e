#include "pgvar/error.hpp"

namespace pgvar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_shape: return "invalid-shape";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::degenerate_graph: return "degenerate-graph";
    case ErrorCode::degenerate_scale: return "degenerate-scale";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::format_error: return "format-error";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::rank_deficient: return "rank-deficient";
    case ErrorCode::instability: return "instability";
    case ErrorCode::undefined_normalization: return "undefined-normalization";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace pgvar
