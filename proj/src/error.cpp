#include "mdslab/error.hpp"

#include <sstream>

#include "mdslab/tensor.hpp"

namespace mdslab {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kOutOfRange: return "out_of_range";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kSizeMismatch: return "size_mismatch";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kState: return "state";
  }
  return "unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kParse:
      return true;
    default:
      return false;
  }
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

}  // namespace mdslab
