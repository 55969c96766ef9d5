#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lamof {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  DegenerateRotation,
  NotARotation,
  InvalidSkeleton,
  TooFewSamples,
  EvenWindow,
  SingleSegment,
  FrameCountMismatch,
  ShapeMismatch,
  WrongRepresentation,
  NoFootJoints,
  TooShortForTransition,
  RepresentationMismatch,
  BadClipLength,
  EmptyPrompt,
  Infeasible,
  LengthMismatch,
  BadMagic,
  VersionUnsupported,
  TruncatedFile,
  ChecksumMismatch,
  TrailingData,
  ParseError,
  IoError,
  Internal,
};

/// Machine-readable name used in CLI error reports, e.g. "INFEASIBLE_DURATION".
constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::NonFinite: return "NON_FINITE";
    case ErrorCode::DegenerateRotation: return "DEGENERATE_ROTATION";
    case ErrorCode::NotARotation: return "NOT_A_ROTATION";
    case ErrorCode::InvalidSkeleton: return "INVALID_SKELETON";
    case ErrorCode::TooFewSamples: return "TOO_FEW_SAMPLES";
    case ErrorCode::EvenWindow: return "EVEN_WINDOW";
    case ErrorCode::SingleSegment: return "SINGLE_SEGMENT";
    case ErrorCode::FrameCountMismatch: return "FRAME_COUNT_MISMATCH";
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::WrongRepresentation: return "WRONG_REPRESENTATION";
    case ErrorCode::NoFootJoints: return "NO_FOOT_JOINTS";
    case ErrorCode::TooShortForTransition: return "TOO_SHORT_FOR_TRANSITION";
    case ErrorCode::RepresentationMismatch: return "REPRESENTATION_MISMATCH";
    case ErrorCode::BadClipLength: return "BAD_CLIP_LENGTH";
    case ErrorCode::EmptyPrompt: return "EMPTY_PROMPT";
    case ErrorCode::Infeasible: return "INFEASIBLE_DURATION";
    case ErrorCode::LengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::BadMagic: return "BAD_MAGIC";
    case ErrorCode::VersionUnsupported: return "VERSION_UNSUPPORTED";
    case ErrorCode::TruncatedFile: return "TRUNCATED_FILE";
    case ErrorCode::ChecksumMismatch: return "CHECKSUM_MISMATCH";
    case ErrorCode::TrailingData: return "TRAILING_DATA";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::Internal: return "INTERNAL";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string context = {})
      : std::runtime_error(message), code_(code), context_(std::move(context)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

}  // namespace lamof
