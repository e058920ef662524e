#include "chordflow/errors.hpp"

namespace chordflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ConvexityLoss: return "ConvexityLoss";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::PsiDivergentAtZero: return "PsiDivergentAtZero";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::PointOutsideBody: return "PointOutsideBody";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::DivergedBounds: return "DivergedBounds";
    case ErrorCode::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace chordflow
