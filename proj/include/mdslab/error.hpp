#pragma once

#include <stdexcept>
#include <string>

namespace mdslab {

// Values mirror mdslab_status in mdslab.h.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kOutOfRange = 2,
  kNumeric = 3,
  kIo = 4,
  kVersionMismatch = 5,
  kShapeMismatch = 6,
  kSizeMismatch = 7,
  kTruncated = 8,
  kParse = 9,
  kState = 10,
};

const char* error_code_name(ErrorCode code) noexcept;

// Validation-class errors map to CLI exit status 2, everything else to 1.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace mdslab
