#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace posegate {

enum class ErrorCode {
  kParse,
  kInvalidArgument,
  kZeroNormOrientation,
  kNonUnitQuaternion,
  kDuplicateImageId,
  kMissingDescriptors,
  kKindMismatch,
  kDecode,
  kDetectorFailure,
  kPredictionFailure,
  kMissingGroundTruth,
  kSceneMismatch,
  kDescriptorCollision,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

  // Set for kParse errors raised while reading a text file.
  std::optional<std::size_t> line() const { return line_; }

  static Error Parse(std::size_t line, const std::string& reason) {
    Error e(ErrorCode::kParse, "line " + std::to_string(line) + ": " + reason);
    e.line_ = line;
    return e;
  }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace posegate
