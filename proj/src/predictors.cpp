#include "posegate/predictors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "posegate/random.hpp"

namespace posegate {

FilePosePredictor::FilePosePredictor(std::span<const PoseRecord> records) {
  for (const PoseRecord& r : records) {
    if (!poses_.emplace(r.image_id, r.pose).second) {
      throw Error(ErrorCode::kDuplicateImageId, "duplicate prediction for " + r.image_id);
    }
  }
}

FilePosePredictor FilePosePredictor::FromFile(const std::filesystem::path& path) {
  return FilePosePredictor(ReadPoseFile(path));
}

Pose FilePosePredictor::Predict(const std::string& image_id) const {
  const auto it = poses_.find(image_id);
  if (it == poses_.end()) {
    throw Error(ErrorCode::kPredictionFailure, "no prediction for " + image_id);
  }
  return it->second;
}

SyntheticPosePredictor::SyntheticPosePredictor(std::span<const PoseRecord> ground_truth,
                                               SyntheticPredictorConfig cfg)
    : cfg_(std::move(cfg)) {
  if (cfg_.sigma_pos_m < 0 || cfg_.sigma_rot_deg < 0 || cfg_.p_out < 0 || cfg_.p_out > 1) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic predictor parameters out of range");
  }
  for (const PoseRecord& r : ground_truth) truth_.insert_or_assign(r.image_id, r.pose.Normalized());
}

SyntheticPosePredictor::Draw SyntheticPosePredictor::Sample(const std::string& image_id) const {
  const auto it = truth_.find(image_id);
  if (it == truth_.end()) {
    throw Error(ErrorCode::kPredictionFailure, "no ground truth for synthetic prediction of " + image_id);
  }
  const Pose& gt = it->second;
  Rng rng(MixSeeds(cfg_.seed, HashImageId(image_id)));

  // Fixed draw order so every image consumes the same stream layout.
  const double u_out = rng.Uniform();
  const Eigen::Vector3d noise = rng.NormalVector();
  const Eigen::Vector3d axis = rng.UnitVector();
  const double angle_deg = rng.Normal() * cfg_.sigma_rot_deg;
  const Eigen::Vector3d direction = rng.UnitVector();
  const Eigen::Vector3d in_box = rng.InBox(cfg_.scene_box.min, cfg_.scene_box.max);
  const Eigen::Quaterniond random_rotation = rng.UniformRotation();

  const bool outside =
      cfg_.training_region.has_value() && !cfg_.training_region->Contains(gt.position());
  const bool outlier = outside || u_out < cfg_.p_out;
  if (outlier) {
    const Eigen::Vector3d position = cfg_.outlier_offset_m
                                         ? Eigen::Vector3d(gt.position() + *cfg_.outlier_offset_m * direction)
                                         : in_box;
    return {PoseFromRotation(position, random_rotation), true};
  }
  const Eigen::Vector3d position = gt.position() + cfg_.sigma_pos_m * noise;
  const Eigen::AngleAxisd perturb(angle_deg * std::numbers::pi / 180.0, axis);
  const Eigen::Quaterniond rotation = (gt.rotation() * Eigen::Quaterniond(perturb)).normalized();
  return {PoseFromRotation(position, rotation), false};
}

Pose SyntheticPosePredictor::Predict(const std::string& image_id) const {
  return Sample(image_id).pose;
}

bool SyntheticPosePredictor::IsOutlier(const std::string& image_id) const {
  return Sample(image_id).outlier;
}

std::optional<SyntheticSpec> ParseSyntheticSpec(std::string_view text) {
  constexpr std::string_view kPrefix = "synthetic:";
  if (!text.starts_with(kPrefix)) return std::nullopt;
  text.remove_prefix(kPrefix.size());
  std::vector<std::string_view> parts;
  while (true) {
    const std::size_t comma = text.find(',');
    parts.push_back(text.substr(0, comma));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (parts.size() != 4 && parts.size() != 5) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected synthetic:sigma_pos,sigma_rot,p_out,seed[,outlier_offset]");
  }
  auto number = [](std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "bad number in synthetic spec: " + std::string(s));
    }
    return v;
  };
  SyntheticSpec spec;
  spec.sigma_pos_m = number(parts[0]);
  spec.sigma_rot_deg = number(parts[1]);
  spec.p_out = number(parts[2]);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(parts[3].data(), parts[3].data() + parts[3].size(), seed);
  if (ec != std::errc() || ptr != parts[3].data() + parts[3].size()) {
    throw Error(ErrorCode::kInvalidArgument, "bad seed in synthetic spec");
  }
  spec.seed = seed;
  if (parts.size() == 5) spec.outlier_offset_m = number(parts[4]);
  if (spec.sigma_pos_m < 0 || spec.sigma_rot_deg < 0 || spec.p_out < 0 || spec.p_out > 1) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic spec parameters out of range");
  }
  return spec;
}

}  // namespace posegate
