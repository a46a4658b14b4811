#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace danlg {

// Coarse error families; the CLI maps each family to its own exit code.
enum class ErrorFamily {
  kConfig = 2,
  kData = 3,
  kDegenerate = 4,
  kIo = 5,
};

enum class ErrorCode {
  kConfig,
  kIo,
  kMalformedMr,
  kInvalidMr,
  kFormat,
  kDegenerateMode,
  kMissingKey,
  kSelfDemonstrator,
  kEmptyInput,
  kDimensionMismatch,
  kZeroVector,
  kMissingPairScore,
  kMissingEmbedding,
  kMissingPrediction,
  kUnknownSampleKey,
  kIncompleteRecord,
  kDuplicateRecord,
  kTooSmall,
  kEmptyLabel,
  kLengthMismatch,
  kDuplicateCell,
  kUnresolvableKey,
};

std::string_view to_string(ErrorCode code);
ErrorFamily family_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorFamily family() const noexcept { return family_of(code_); }

 private:
  ErrorCode code_;
};

// Raised by parse_mr. `position` is a byte offset into the parsed text.
class MalformedMr : public Error {
 public:
  MalformedMr(std::size_t position, std::string reason);

  std::size_t position() const noexcept { return position_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

// Raised by the corpus and record loaders. `row` is the 0-based data row.
class FormatError : public Error {
 public:
  FormatError(std::size_t row, std::string reason);

  std::size_t row() const noexcept { return row_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t row_;
  std::string reason_;
};

}  // namespace danlg
