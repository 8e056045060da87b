#include "lwh/errors.hpp"

namespace lwh {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::OnBranchCut: return "OnBranchCut";
    case ErrorCode::RootSelectionAmbiguous: return "RootSelectionAmbiguous";
    case ErrorCode::PoleAtMinusOne: return "PoleAtMinusOne";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::OutsidePassBand: return "OutsidePassBand";
    case ErrorCode::EmptyAnnulus: return "EmptyAnnulus";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroOnContour: return "ZeroOnContour";
    case ErrorCode::PhaseStepTooLarge: return "PhaseStepTooLarge";
    case ErrorCode::NonzeroWinding: return "NonzeroWinding";
    case ErrorCode::DivergentSeries: return "DivergentSeries";
    case ErrorCode::SingularN: return "SingularN";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::IllConditionedClosure: return "IllConditionedClosure";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::SolveFailure: return "SolveFailure";
    case ErrorCode::WindowMismatch: return "WindowMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Error";
}

bool is_numerical(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoConvergence:
    case ErrorCode::ZeroOnContour:
    case ErrorCode::PhaseStepTooLarge:
    case ErrorCode::NonzeroWinding:
    case ErrorCode::DivergentSeries:
    case ErrorCode::SingularN:
    case ErrorCode::IllConditionedClosure:
    case ErrorCode::SolveFailure:
    case ErrorCode::DegeneratePoint:
    case ErrorCode::OnBranchCut:
    case ErrorCode::RootSelectionAmbiguous:
    case ErrorCode::PoleAtMinusOne:
      return true;
    default:
      return false;
  }
}

}  // namespace lwh
