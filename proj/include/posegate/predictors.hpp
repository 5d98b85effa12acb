#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "posegate/gate.hpp"
#include "posegate/pose_file.hpp"

namespace posegate {

// Serves poses from a prediction file (pose-file grammar); this is how any
// external regressor's output enters the pipeline.
class FilePosePredictor : public PosePredictor {
 public:
  explicit FilePosePredictor(std::span<const PoseRecord> records);
  static FilePosePredictor FromFile(const std::filesystem::path& path);

  Pose Predict(const std::string& image_id) const override;
  std::size_t size() const { return poses_.size(); }

 private:
  std::unordered_map<std::string, Pose> poses_;
};

struct SyntheticPredictorConfig {
  double sigma_pos_m = 0.05;
  double sigma_rot_deg = 1.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
  // Outliers are drawn uniformly in this box with a uniform rotation...
  AxisAlignedBox scene_box;
  // ...unless set, in which case they sit this far from the truth (random
  // direction) with a uniform rotation.
  std::optional<double> outlier_offset_m;
  // When set, queries whose true position lies outside this box always get
  // an outlier, modelling a regressor that cannot extrapolate.
  std::optional<AxisAlignedBox> training_region;
};

// Ground truth plus Gaussian position noise and random-axis rotation noise,
// replaced by an outlier with probability p_out. Deterministic per
// (seed, image_id) and safe to call concurrently.
class SyntheticPosePredictor : public PosePredictor {
 public:
  SyntheticPosePredictor(std::span<const PoseRecord> ground_truth, SyntheticPredictorConfig cfg);

  Pose Predict(const std::string& image_id) const override;

  // Whether Predict returns an outlier for this image.
  bool IsOutlier(const std::string& image_id) const;

  const SyntheticPredictorConfig& config() const { return cfg_; }

 private:
  struct Draw {
    Pose pose;
    bool outlier;
  };
  Draw Sample(const std::string& image_id) const;

  std::unordered_map<std::string, Pose> truth_;
  SyntheticPredictorConfig cfg_;
};

struct SyntheticSpec {
  double sigma_pos_m = 0.0;
  double sigma_rot_deg = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> outlier_offset_m;
};

// Parses "synthetic:sigma_pos,sigma_rot,p_out,seed[,outlier_offset]".
// Returns nullopt when the text does not start with "synthetic:".
std::optional<SyntheticSpec> ParseSyntheticSpec(std::string_view text);

}  // namespace posegate
