#pragma once

#include <stdexcept>
#include <string>

namespace ibex {

enum class ErrorCode {
  NegativeEntry,
  SumOutOfTolerance,
  EmptyAfterPruning,
  BadShape,
  SupportViolation,
  OutOfRange,
  FlatRegion,
  IdentityFamily,
  UnknownShape,
  SizeLimit,
  Parse,
};

const char* to_string(ErrorCode code);

// Every recoverable failure in the library surfaces as this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ibex
