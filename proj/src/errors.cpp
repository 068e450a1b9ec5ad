#include "sparse_forge/errors.hpp"

namespace sparse_forge {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::incomparable: return "INCOMPARABLE";
    case ErrorCode::empty_set: return "EMPTY_SET";
    case ErrorCode::overflow: return "OVERFLOW";
    case ErrorCode::underflow: return "UNDERFLOW";
    case ErrorCode::depth_exceeded: return "DEPTH_EXCEEDED";
    case ErrorCode::lengths_not_summable: return "LENGTHS_NOT_SUMMABLE";
    case ErrorCode::no_gaps: return "NO_GAPS";
    case ErrorCode::overlapping_gaps: return "OVERLAPPING_GAPS";
    case ErrorCode::no_chain: return "NO_CHAIN";
    case ErrorCode::collision: return "COLLISION";
    case ErrorCode::not_found: return "NOT_FOUND";
    case ErrorCode::tie: return "TIE";
    case ErrorCode::unsupported_dimension: return "UNSUPPORTED_DIMENSION";
    case ErrorCode::degenerate: return "DEGENERATE";
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    case ErrorCode::parse_error: return "PARSE_ERROR";
    case ErrorCode::io_error: return "IO_ERROR";
  }
  return "UNKNOWN_ERROR";
}

}  // namespace sparse_forge
