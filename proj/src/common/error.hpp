#pragma once

#include <stdexcept>
#include <string>

namespace mlfw {

enum class ErrorCode {
  InvalidArgument = 1,
  UnknownSymbol,
  DeadPrefix,
  RankOutOfRange,
  EmptySlice,
  BinUnfillable,
  ShapeMismatch,
  NonFiniteLoss,
  BadDistribution,
  Io,
  Format,
};

const char* error_code_name(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// C layer can map it onto a status value without string matching.
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

}  // namespace mlfw
