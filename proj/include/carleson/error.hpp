#pragma once

#include <stdexcept>
#include <string>

namespace carleson {

enum class ErrorCode {
  size = 1,
  shape_mismatch,
  invalid_node,
  domain,
  precondition,
  normalization,
  parse,
  validation,
  invalid_argument,
  internal,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; the C boundary maps
// code() onto crl_status.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace carleson
