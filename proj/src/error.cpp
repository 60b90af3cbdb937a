#include "camgeom/error.hpp"

namespace camgeom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kNonPositiveSize: return "NonPositiveSize";
    case ErrorCode::kNonPositiveScale: return "NonPositiveScale";
    case ErrorCode::kNonPositiveInput: return "NonPositiveInput";
    case ErrorCode::kNonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::kGridExceedsImage: return "GridExceedsImage";
    case ErrorCode::kBadDimension: return "BadDimension";
    case ErrorCode::kExtentMismatch: return "ExtentMismatch";
    case ErrorCode::kCropOutOfBounds: return "CropOutOfBounds";
    case ErrorCode::kDegenerateBox: return "DegenerateBox";
    case ErrorCode::kBadThreshold: return "BadThreshold";
    case ErrorCode::kNoParsableJson: return "NoParsableJson";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace camgeom
