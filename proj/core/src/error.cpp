#include "archmark/error.hpp"

namespace archmark {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::MalformedAscii: return "MalformedAscii";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnparseableRow: return "UnparseableRow";
    case ErrorCode::MissingLandmark: return "MissingLandmark";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::UnbalancedRequest: return "UnbalancedRequest";
    case ErrorCode::TooFewViews: return "TooFewViews";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoForwardState: return "NoForwardState";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ArchitectureMismatch: return "ArchitectureMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::InsufficientRays: return "InsufficientRays";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NonpositiveVolume: return "NonpositiveVolume";
    case ErrorCode::EmptyErrors: return "EmptyErrors";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::ParseError:
    case ErrorCode::UnknownKey:
    case ErrorCode::InvalidValue:
    case ErrorCode::TooFewViews:
      return ErrorCategory::Usage;
    case ErrorCode::DegenerateGeometry:
    case ErrorCode::InsufficientRays:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::ZeroMean:
    case ErrorCode::ZeroVariance:
    case ErrorCode::NonpositiveVolume:
    case ErrorCode::EmptyErrors:
    case ErrorCode::InvalidP:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::NoForwardState:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

}  // namespace archmark
