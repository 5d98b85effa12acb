#include "posegate/descriptors.hpp"

#include <cmath>
#include <utility>

#include "posegate/error.hpp"

namespace posegate {

DescriptorSet DescriptorSet::Real(std::string image_id, std::vector<Keypoint> keypoints,
                                  std::size_t dim, std::vector<float> data) {
  DescriptorSet set;
  set.image_id_ = std::move(image_id);
  set.kind_ = DescriptorKind::kRealL2;
  set.dim_ = dim;
  set.keypoints_ = std::move(keypoints);
  set.real_ = std::move(data);
  set.Validate();
  return set;
}

DescriptorSet DescriptorSet::Binary(std::string image_id, std::vector<Keypoint> keypoints,
                                    std::size_t dim_bytes, std::vector<std::uint8_t> data) {
  DescriptorSet set;
  set.image_id_ = std::move(image_id);
  set.kind_ = DescriptorKind::kBinaryHamming;
  set.dim_ = dim_bytes;
  set.keypoints_ = std::move(keypoints);
  set.binary_ = std::move(data);
  set.Validate();
  return set;
}

void DescriptorSet::Validate() const {
  if (dim_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor dimension must be positive");
  }
  const std::size_t stored = kind_ == DescriptorKind::kRealL2 ? real_.size() : binary_.size();
  if (stored != keypoints_.size() * dim_) {
    throw Error(ErrorCode::kInvalidArgument,
                "descriptor data size does not equal keypoints x dim for " + image_id_);
  }
  for (const Keypoint& kp : keypoints_) {
    if (!(kp.x >= 0.0f && kp.x < kPreprocessedSize && kp.y >= 0.0f &&
          kp.y < kPreprocessedSize)) {
      throw Error(ErrorCode::kInvalidArgument, "keypoint outside [0, 380) in " + image_id_);
    }
  }
  for (float v : real_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite descriptor element in " + image_id_);
    }
  }
}

void ValidateMatcherConfig(const MatcherConfig& cfg) {
  if (!(cfg.ratio > 0.0 && cfg.ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ratio must lie in (0, 1]");
  }
}

}  // namespace posegate
