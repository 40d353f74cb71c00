#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoobs {

enum class ErrorCode {
  InvalidInput,
  NonzeroConstantTerm,
  SingularJacobian,
  NotOnIntersection,
  ParallelNormals,
  NoValidTilt,
  FrameNotNormalized,
  NonzeroSlope,
  ImplicitSolveFailed,
  NotASaddle,
  DeltaOutOfRange,
  AsymptoteDegenerate,
  ZeroForm,
  NonPositiveInput,
  InconsistentInitialState,
  LeftChart,
  NonConverged,
  IoFailure,
};

std::string_view to_string(ErrorCode code);

// Every library failure is an Error; the code is what the CLI reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace geoobs
