#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "posegate/descriptors.hpp"
#include "posegate/image.hpp"

namespace posegate {

// Feature extraction contract: deterministic for identical input, safe to
// call concurrently.
class FeatureDetector {
 public:
  virtual ~FeatureDetector() = default;
  virtual DescriptorSet Detect(const Image& preprocessed, const std::string& image_id) const = 0;
};

// Harris corners with non-maximum suppression, described by 256-bit binary
// intensity comparisons on a box-smoothed patch.
class CornerBinaryDetector : public FeatureDetector {
 public:
  struct Options {
    double harris_k = 0.04;
    double min_response = 1e-3;       // on gradients normalised to [-1, 1]
    double relative_response = 0.01;  // fraction of the strongest response
    int nms_radius = 3;
    std::size_t max_keypoints = 1000;
  };

  static constexpr int kPatchRadius = 15;
  static constexpr int kSmoothRadius = 2;
  static constexpr int kBorder = kPatchRadius + kSmoothRadius + 1;
  static constexpr std::size_t kDescriptorBytes = 32;

  CornerBinaryDetector() = default;
  explicit CornerBinaryDetector(Options options) : options_(options) {}

  DescriptorSet Detect(const Image& preprocessed, const std::string& image_id) const override;

 private:
  Options options_;
};

// Ignores pixels and loads the precomputed cache file for image_id from a
// directory. This is how externally extracted descriptors enter the pipeline.
class CachedDescriptorDetector : public FeatureDetector {
 public:
  explicit CachedDescriptorDetector(std::filesystem::path directory)
      : directory_(std::move(directory)) {}

  DescriptorSet Detect(const Image& preprocessed, const std::string& image_id) const override;

 private:
  std::filesystem::path directory_;
};

// Checks the 380x380 grayscale precondition, then runs the detector.
// Detector exceptions other than posegate::Error become kDetectorFailure.
DescriptorSet ExtractFeatures(const Image& preprocessed, const FeatureDetector& detector,
                              const std::string& image_id);

}  // namespace posegate
