#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace archmark {

enum class ErrorCode {
  // input data
  TruncatedFile,
  MalformedAscii,
  EmptyMesh,
  DuplicateIndex,
  IndexOutOfRange,
  UnparseableRow,
  MissingLandmark,
  SchemaMismatch,
  InvalidParams,
  InvalidRange,
  // configuration / usage
  InvalidConfig,
  ParseError,
  UnknownKey,
  InvalidValue,
  UnbalancedRequest,
  TooFewViews,
  // network
  ShapeMismatch,
  NoForwardState,
  EmptyDataset,
  VersionMismatch,
  ArchitectureMismatch,
  CorruptFile,
  // numerics
  DegenerateGeometry,
  InsufficientRays,
  InsufficientSamples,
  ZeroMean,
  ZeroVariance,
  NonpositiveVolume,
  EmptyErrors,
  InvalidP,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Coarse grouping used to map failures onto process exit codes.
enum class ErrorCategory { Usage, Data, Numerical };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace archmark
