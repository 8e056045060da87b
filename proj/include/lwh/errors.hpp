#pragma once

#include <stdexcept>
#include <string>

namespace lwh {

enum class ErrorCode {
  DegeneratePoint,
  OnBranchCut,
  RootSelectionAmbiguous,
  PoleAtMinusOne,
  NoConvergence,
  OutsidePassBand,
  EmptyAnnulus,
  LengthMismatch,
  ZeroOnContour,
  PhaseStepTooLarge,
  NonzeroWinding,
  DivergentSeries,
  SingularN,
  UnsupportedFamily,
  IllConditionedClosure,
  WindowTooLarge,
  InvalidSpec,
  WindowTooSmall,
  SolveFailure,
  WindowMismatch,
  InvalidConfig,
};

const char* error_name(ErrorCode c);

// true for failures that come from the numerics rather than the input
bool is_numerical(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lwh
