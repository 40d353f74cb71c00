#include "geoobs/errors.hpp"

namespace geoobs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonzeroConstantTerm: return "NonzeroConstantTerm";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::NotOnIntersection: return "NotOnIntersection";
    case ErrorCode::ParallelNormals: return "ParallelNormals";
    case ErrorCode::NoValidTilt: return "NoValidTilt";
    case ErrorCode::FrameNotNormalized: return "FrameNotNormalized";
    case ErrorCode::NonzeroSlope: return "NonzeroSlope";
    case ErrorCode::ImplicitSolveFailed: return "ImplicitSolveFailed";
    case ErrorCode::NotASaddle: return "NotASaddle";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::AsymptoteDegenerate: return "AsymptoteDegenerate";
    case ErrorCode::ZeroForm: return "ZeroForm";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::InconsistentInitialState: return "InconsistentInitialState";
    case ErrorCode::LeftChart: return "LeftChart";
    case ErrorCode::NonConverged: return "NonConverged";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace geoobs
