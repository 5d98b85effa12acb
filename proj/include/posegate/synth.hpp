#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "posegate/descriptors.hpp"
#include "posegate/pose.hpp"
#include "posegate/pose_db.hpp"

namespace posegate {

// Ratio the synthetic descriptor spacing is designed for: matching at this
// ratio or below accepts exactly the landmarks two frames share.
inline constexpr double kSceneMatchRatio = 0.7;

struct Landmark {
  Eigen::Vector3d position;
  std::vector<std::uint8_t> descriptor;
};

struct SceneConfig {
  std::uint64_t seed = 42;
  std::size_t n_landmarks = 2000;
  AxisAlignedBox box{Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(24, 4, 24)};
  double fov_half_angle_deg = 30.0;  // must be below 90
  double max_view_distance_m = 8.0;
  std::size_t descriptor_bits = 256;  // multiple of 8
};

// Landmarks with pairwise Hamming distances inside [MinDescriptorDistance,
// MaxDescriptorDistance] of the descriptor length.
struct SyntheticScene {
  SceneConfig config;
  std::vector<Landmark> landmarks;

  std::size_t descriptor_bytes() const { return config.descriptor_bits / 8; }
};

// ceil(0.4 * bits)
std::size_t MinDescriptorDistance(std::size_t bits);
// Largest m with MinDescriptorDistance(bits) >= kSceneMatchRatio * m.
std::size_t MaxDescriptorDistance(std::size_t bits);

// Throws kDescriptorCollision when the spacing cannot be met.
SyntheticScene GenerateScene(const SceneConfig& cfg);

// Scene with caller-placed landmarks; descriptors still come from cfg.seed.
SyntheticScene SceneFromLandmarks(const SceneConfig& cfg,
                                  const std::vector<Eigen::Vector3d>& positions);

struct SyntheticFrame {
  std::string image_id;
  Pose true_pose;
  std::vector<std::uint32_t> visible_landmark_ids;  // ascending
  DescriptorSet descriptor_set;                     // one row per visible landmark
};

// Forward axis is the pose rotation applied to +z.
bool IsLandmarkVisible(const SyntheticScene& scene, const Pose& pose, const Eigen::Vector3d& landmark);

SyntheticFrame RenderFrame(const SyntheticScene& scene, const Pose& pose, std::string image_id);

struct SplitConfig {
  std::uint64_t seed = 7;
  std::size_t n_train = 400;
  std::size_t n_test = 200;
  double coverage_bias = 0.0;  // fraction of test poses placed outside the training region
  std::size_t n_sequences = 4;
  double train_fraction_x = 0.45;  // share of the box x-extent used for training walks
  double gap_m = 3.0;              // min x-gap between training region and outside queries
  double step_m = 0.15;
  double query_jitter_m = 0.1;
  double query_jitter_deg = 5.0;
};

struct SyntheticSplit {
  PoseDatabase db;  // training frames with descriptors attached
  std::vector<SyntheticFrame> train_frames;
  std::vector<SyntheticFrame> test_frames;
  std::vector<bool> test_outside;  // generator label per test frame
  std::vector<std::vector<std::string>> sequences;  // training ids per walk
  AxisAlignedBox training_region;  // holds every training and in-region test pose
};

SyntheticSplit GenerateSplit(const SyntheticScene& scene, const SplitConfig& cfg);

// Writes train.txt, test.txt, anchors.txt (first sequence), labels.txt and
// descriptors/<id>.pgdc for every frame.
void WriteSyntheticDataset(const SyntheticSplit& split, const std::filesystem::path& dir);

}  // namespace posegate
