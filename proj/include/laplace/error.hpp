#pragma once

#include <stdexcept>
#include <string>

namespace laplace {

// Error categories surfaced by the core library. The C API maps these
// one-to-one onto its status codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kParse,
  kDimensionMismatch,
  kDerivativeOrder,
  kBoundaryMaximum,
  kNoConvergence,
  kAssumptionViolated,
  kDegenerate,
  kInsufficientData,
};

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

}  // namespace laplace
