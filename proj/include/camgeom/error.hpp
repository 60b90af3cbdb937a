#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace camgeom {

enum class ErrorCode {
  kInvalidArgument,
  kNonPositiveDepth,
  kNonPositiveSize,
  kNonPositiveScale,
  kNonPositiveInput,
  kNonPositiveFactor,
  kGridExceedsImage,
  kBadDimension,
  kExtentMismatch,
  kCropOutOfBounds,
  kDegenerateBox,
  kBadThreshold,
  kNoParsableJson,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this one exception type; the
// code lets callers (and the CLI exit-code mapping) branch on the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace camgeom
