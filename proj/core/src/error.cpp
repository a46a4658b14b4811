#include "danlg/error.hpp"

#include <utility>

namespace danlg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kMalformedMr: return "MalformedMr";
    case ErrorCode::kInvalidMr: return "InvalidMr";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kDegenerateMode: return "DegenerateMode";
    case ErrorCode::kMissingKey: return "MissingKey";
    case ErrorCode::kSelfDemonstrator: return "SelfDemonstrator";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kMissingPairScore: return "MissingPairScore";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kMissingPrediction: return "MissingPrediction";
    case ErrorCode::kUnknownSampleKey: return "UnknownSampleKey";
    case ErrorCode::kIncompleteRecord: return "IncompleteRecord";
    case ErrorCode::kDuplicateRecord: return "DuplicateRecord";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kEmptyLabel: return "EmptyLabel";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDuplicateCell: return "DuplicateCell";
    case ErrorCode::kUnresolvableKey: return "UnresolvableKey";
  }
  return "Error";
}

ErrorFamily family_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return ErrorFamily::kConfig;
    case ErrorCode::kIo: return ErrorFamily::kIo;
    case ErrorCode::kDegenerateMode: return ErrorFamily::kDegenerate;
    default: return ErrorFamily::kData;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

MalformedMr::MalformedMr(std::size_t position, std::string reason)
    : Error(ErrorCode::kMalformedMr,
            reason + " at offset " + std::to_string(position)),
      position_(position),
      reason_(std::move(reason)) {}

FormatError::FormatError(std::size_t row, std::string reason)
    : Error(ErrorCode::kFormat, "row " + std::to_string(row) + ": " + reason),
      row_(row),
      reason_(std::move(reason)) {}

}  // namespace danlg
