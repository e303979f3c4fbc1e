#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pgvar {

enum class ErrorCode {
  invalid_parameter,
  invalid_input,
  invalid_shape,
  dimension_mismatch,
  degenerate_graph,
  degenerate_scale,
  unsupported,
  format_error,
  insufficient_data,
  rank_deficient,
  instability,
  undefined_normalization,
  io_error,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so
// callers (and tests) can branch on the category rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace pgvar
