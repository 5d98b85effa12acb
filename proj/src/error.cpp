#include "posegate/error.hpp"

namespace posegate {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kZeroNormOrientation: return "ZeroNormOrientation";
    case ErrorCode::kNonUnitQuaternion: return "NonUnitQuaternion";
    case ErrorCode::kDuplicateImageId: return "DuplicateImageId";
    case ErrorCode::kMissingDescriptors: return "MissingDescriptors";
    case ErrorCode::kKindMismatch: return "KindMismatch";
    case ErrorCode::kDecode: return "DecodeError";
    case ErrorCode::kDetectorFailure: return "DetectorFailure";
    case ErrorCode::kPredictionFailure: return "PredictionFailure";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kSceneMismatch: return "SceneMismatch";
    case ErrorCode::kDescriptorCollision: return "DescriptorCollision";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace posegate
