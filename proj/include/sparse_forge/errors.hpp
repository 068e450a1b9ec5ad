#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sparse_forge {

enum class ErrorCode {
  incomparable,
  empty_set,
  overflow,
  underflow,
  depth_exceeded,
  lengths_not_summable,
  no_gaps,
  overlapping_gaps,
  no_chain,
  collision,
  not_found,
  tie,
  unsupported_dimension,
  degenerate,
  invalid_argument,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Thrown by certified arithmetic when an enclosure is too wide to decide a
// sign or an ordering at the working precision. Callers refine or report
// UNKNOWN; it never escapes a public comparison API.
class Uncertain : public std::runtime_error {
 public:
  explicit Uncertain(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sparse_forge
