#include "posegate/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>

#include "posegate/descriptor_cache.hpp"
#include "posegate/error.hpp"
#include "posegate/pose_file.hpp"
#include "posegate/random.hpp"

namespace posegate {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::size_t Distance(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::size_t d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d += std::popcount(static_cast<unsigned>(a[k] ^ b[k]));
  return d;
}

bool Bit(const std::vector<std::uint8_t>& v, std::size_t b) { return (v[b / 8] >> (b % 8)) & 1u; }

std::size_t Violation(std::size_t d, std::size_t lo, std::size_t hi) {
  if (d < lo) return lo - d;
  if (d > hi) return d - hi;
  return 0;
}

// Random descriptors repaired by greedy bit flips until every pairwise
// distance to the accepted set lies in [lo, hi].
std::vector<std::vector<std::uint8_t>> GenerateDescriptors(Rng& rng, std::size_t count,
                                                           std::size_t bits) {
  const std::size_t bytes = bits / 8;
  const std::size_t lo = MinDescriptorDistance(bits);
  const std::size_t hi = MaxDescriptorDistance(bits);
  if (hi < lo) throw Error(ErrorCode::kDescriptorCollision, "descriptor spacing infeasible");
  constexpr int kAttempts = 64;
  const std::size_t repair_steps = 4 * bits;
  constexpr int kCandidateBits = 8;

  std::vector<std::vector<std::uint8_t>> accepted;
  accepted.reserve(count);
  std::vector<std::size_t> dist;
  for (std::size_t n = 0; n < count; ++n) {
    bool done = false;
    for (int attempt = 0; attempt < kAttempts && !done; ++attempt) {
      std::vector<std::uint8_t> cand(bytes);
      for (std::uint8_t& b : cand) b = static_cast<std::uint8_t>(rng.NextU64() & 0xff);
      dist.resize(accepted.size());
      std::size_t total = 0;
      for (std::size_t i = 0; i < accepted.size(); ++i) {
        dist[i] = Distance(cand, accepted[i]);
        total += Violation(dist[i], lo, hi);
      }
      for (std::size_t step = 0; step < repair_steps && total > 0; ++step) {
        // Flip the best of a few random bits, measured by total violation.
        std::size_t best_bit = bits;
        std::size_t best_total = total;
        for (int c = 0; c < kCandidateBits; ++c) {
          const std::size_t b = rng.Index(bits);
          const bool cb = Bit(cand, b);
          std::size_t t = 0;
          for (std::size_t i = 0; i < accepted.size(); ++i) {
            const std::size_t d = Bit(accepted[i], b) == cb ? dist[i] + 1 : dist[i] - 1;
            t += Violation(d, lo, hi);
          }
          if (t < best_total) {
            best_total = t;
            best_bit = b;
          }
        }
        if (best_bit == bits) continue;
        const bool cb = Bit(cand, best_bit);
        for (std::size_t i = 0; i < accepted.size(); ++i) {
          dist[i] = Bit(accepted[i], best_bit) == cb ? dist[i] + 1 : dist[i] - 1;
        }
        cand[best_bit / 8] ^= static_cast<std::uint8_t>(1u << (best_bit % 8));
        total = best_total;
      }
      if (total == 0) {
        accepted.push_back(std::move(cand));
        done = true;
      }
    }
    if (!done) {
      throw Error(ErrorCode::kDescriptorCollision,
                  "could not place descriptor " + std::to_string(n) + " with " +
                      std::to_string(bits) + " bits");
    }
  }
  return accepted;
}

void CheckSceneConfig(const SceneConfig& cfg) {
  if (cfg.n_landmarks < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one landmark");
  if (cfg.descriptor_bits == 0 || cfg.descriptor_bits % 8 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor bits must be a positive multiple of 8");
  }
  if (!(cfg.fov_half_angle_deg > 0.0 && cfg.fov_half_angle_deg < 90.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fov half-angle must lie in (0, 90) degrees");
  }
  if (!(cfg.max_view_distance_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max view distance must be positive");
  }
  if (!((cfg.box.max.array() > cfg.box.min.array()).all())) {
    throw Error(ErrorCode::kInvalidArgument, "scene box is empty");
  }
}

Eigen::Quaterniond YawPitch(double yaw, double pitch) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()) *
                            Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()));
}

}  // namespace

std::size_t MinDescriptorDistance(std::size_t bits) { return (4 * bits + 9) / 10; }

std::size_t MaxDescriptorDistance(std::size_t bits) {
  const double lo = static_cast<double>(MinDescriptorDistance(bits));
  std::size_t m = 0;
  while (lo >= kSceneMatchRatio * static_cast<double>(m + 1)) ++m;
  return m;
}

SyntheticScene SceneFromLandmarks(const SceneConfig& cfg,
                                  const std::vector<Eigen::Vector3d>& positions) {
  SceneConfig c = cfg;
  c.n_landmarks = positions.size();
  CheckSceneConfig(c);
  Rng rng(MixSeeds(c.seed, 0xdE5C));
  auto descriptors = GenerateDescriptors(rng, positions.size(), c.descriptor_bits);
  SyntheticScene scene{c, {}};
  scene.landmarks.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    scene.landmarks.push_back({positions[i], std::move(descriptors[i])});
  }
  return scene;
}

SyntheticScene GenerateScene(const SceneConfig& cfg) {
  CheckSceneConfig(cfg);
  Rng rng(MixSeeds(cfg.seed, 0x1A4D));
  std::vector<Eigen::Vector3d> positions(cfg.n_landmarks);
  for (Eigen::Vector3d& p : positions) p = rng.InBox(cfg.box.min, cfg.box.max);
  return SceneFromLandmarks(cfg, positions);
}

bool IsLandmarkVisible(const SyntheticScene& scene, const Pose& pose, const Eigen::Vector3d& landmark) {
  const Eigen::Vector3d v = landmark - pose.position();
  const double dist = v.norm();
  if (!(dist > 0.0) || dist > scene.config.max_view_distance_m) return false;
  const Eigen::Vector3d forward = pose.rotation() * Eigen::Vector3d::UnitZ();
  return forward.dot(v) / dist >= std::cos(scene.config.fov_half_angle_deg * kDegToRad);
}

SyntheticFrame RenderFrame(const SyntheticScene& scene, const Pose& pose, std::string image_id) {
  SyntheticFrame frame{std::move(image_id), pose, {}, {}};
  const Eigen::Matrix3d world_to_camera = pose.rotation().toRotationMatrix().transpose();
  const double half = kPreprocessedSize / 2.0;
  const double focal = 0.999 * half / std::tan(scene.config.fov_half_angle_deg * kDegToRad);
  const float max_coord = std::nextafter(static_cast<float>(kPreprocessedSize), 0.0f);

  std::vector<Keypoint> keypoints;
  std::vector<std::uint8_t> data;
  for (std::size_t i = 0; i < scene.landmarks.size(); ++i) {
    const Landmark& lm = scene.landmarks[i];
    if (!IsLandmarkVisible(scene, pose, lm.position)) continue;
    frame.visible_landmark_ids.push_back(static_cast<std::uint32_t>(i));
    const Eigen::Vector3d c = world_to_camera * (lm.position - pose.position());
    const float u = static_cast<float>(half + focal * c.x() / c.z());
    const float v = static_cast<float>(half + focal * c.y() / c.z());
    keypoints.push_back({std::clamp(u, 0.0f, max_coord), std::clamp(v, 0.0f, max_coord)});
    data.insert(data.end(), lm.descriptor.begin(), lm.descriptor.end());
  }
  frame.descriptor_set = DescriptorSet::Binary(frame.image_id, std::move(keypoints),
                                               scene.descriptor_bytes(), std::move(data));
  return frame;
}

SyntheticSplit GenerateSplit(const SyntheticScene& scene, const SplitConfig& cfg) {
  if (cfg.n_train < 1 || cfg.n_test < 1 || cfg.n_sequences < 1) {
    throw Error(ErrorCode::kInvalidArgument, "split counts must be at least 1");
  }
  if (!(cfg.coverage_bias >= 0.0 && cfg.coverage_bias <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "coverage bias must lie in [0, 1]");
  }
  const AxisAlignedBox& box = scene.config.box;
  const Eigen::Vector3d ext = box.extent();
  Rng rng(MixSeeds(cfg.seed, 0x5B117));

  // Walks stay inside a slab at the low-x end of the box, at camera height.
  AxisAlignedBox walk;
  walk.min = Eigen::Vector3d(box.min.x() + 0.05 * ext.x(), box.min.y() + 0.3 * ext.y(),
                             box.min.z() + 0.05 * ext.z());
  walk.max = Eigen::Vector3d(box.min.x() + cfg.train_fraction_x * ext.x(), box.min.y() + 0.6 * ext.y(),
                             box.max.z() - 0.05 * ext.z());
  AxisAlignedBox outside;
  outside.min = Eigen::Vector3d(walk.max.x() + cfg.gap_m, walk.min.y(), walk.min.z());
  outside.max = Eigen::Vector3d(box.max.x() - 0.05 * ext.x(), walk.max.y(), walk.max.z());
  if (cfg.coverage_bias > 0.0 && !(outside.max.x() > outside.min.x())) {
    throw Error(ErrorCode::kInvalidArgument, "no room outside the training region for the gap");
  }

  SyntheticSplit split;
  split.db = PoseDatabase("synthetic-" + std::to_string(scene.config.seed));
  split.training_region = walk;
  split.training_region.min.array() -= cfg.query_jitter_m;
  split.training_region.max.array() += cfg.query_jitter_m;

  char name[64];
  for (std::size_t s = 0; s < cfg.n_sequences; ++s) {
    const std::size_t length =
        cfg.n_train / cfg.n_sequences + (s < cfg.n_train % cfg.n_sequences ? 1 : 0);
    split.sequences.emplace_back();
    Eigen::Vector3d p = rng.InBox(walk.min, walk.max);
    double yaw = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < length; ++i) {
      const double pitch = rng.Normal() * 3.0 * kDegToRad;
      std::snprintf(name, sizeof(name), "seq-%02zu/frame-%05zu", s + 1, i);
      SyntheticFrame frame = RenderFrame(scene, PoseFromRotation(p, YawPitch(yaw, pitch)), name);
      split.db.Add({frame.image_id, frame.true_pose,
                    std::make_shared<const DescriptorSet>(frame.descriptor_set)});
      split.sequences.back().push_back(frame.image_id);
      split.train_frames.push_back(std::move(frame));

      yaw += rng.Normal() * 5.0 * kDegToRad;
      Eigen::Vector3d next = p + cfg.step_m * Eigen::Vector3d(std::sin(yaw), 0.0, std::cos(yaw));
      next.y() = p.y() + rng.Normal() * 0.02;
      if (!walk.Contains(next)) {
        yaw += std::numbers::pi;
        next = p + cfg.step_m * Eigen::Vector3d(std::sin(yaw), 0.0, std::cos(yaw));
        next.y() = std::clamp(p.y(), walk.min.y(), walk.max.y());
        next = next.cwiseMax(walk.min).cwiseMin(walk.max);
      }
      p = next;
    }
  }

  const auto n_out = static_cast<std::size_t>(
      std::llround(cfg.coverage_bias * static_cast<double>(cfg.n_test)));
  split.test_outside.assign(cfg.n_test, false);
  std::fill(split.test_outside.begin(), split.test_outside.begin() + static_cast<std::ptrdiff_t>(n_out), true);
  for (std::size_t i = cfg.n_test; i > 1; --i) {
    const std::size_t j = rng.Index(i);
    const bool tmp = split.test_outside[i - 1];
    split.test_outside[i - 1] = split.test_outside[j];
    split.test_outside[j] = tmp;
  }

  for (std::size_t t = 0; t < cfg.n_test; ++t) {
    std::snprintf(name, sizeof(name), "test/frame-%05zu", t);
    Pose pose;
    if (split.test_outside[t]) {
      const Eigen::Vector3d p = rng.InBox(outside.min, outside.max);
      const double yaw = rng.Uniform(0.0, 2.0 * std::numbers::pi);
      pose = PoseFromRotation(p, YawPitch(yaw, rng.Normal() * 3.0 * kDegToRad));
    } else {
      const Pose& base = split.train_frames[rng.Index(split.train_frames.size())].true_pose;
      Eigen::Vector3d offset = rng.UnitVector() * cfg.query_jitter_m * std::cbrt(rng.Uniform());
      const double yaw = rng.Uniform(-cfg.query_jitter_deg, cfg.query_jitter_deg) * kDegToRad;
      const Eigen::Quaterniond q =
          Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY())) * base.rotation();
      pose = PoseFromRotation(base.position() + offset, q.normalized());
    }
    split.test_frames.push_back(RenderFrame(scene, pose, name));
  }
  return split;
}

void WriteSyntheticDataset(const SyntheticSplit& split, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "descriptors");
  std::vector<PoseRecord> train;
  std::vector<PoseRecord> test;
  for (const SyntheticFrame& f : split.train_frames) {
    train.push_back({f.image_id, f.true_pose});
    WriteDescriptorCache(dir / "descriptors" / DescriptorCacheFileName(f.image_id), f.descriptor_set);
  }
  for (const SyntheticFrame& f : split.test_frames) {
    test.push_back({f.image_id, f.true_pose});
    WriteDescriptorCache(dir / "descriptors" / DescriptorCacheFileName(f.image_id), f.descriptor_set);
  }
  WritePoseFile(dir / "train.txt", train, "image_id tx ty tz qw qx qy qz (training ground truth)");
  WritePoseFile(dir / "test.txt", test, "image_id tx ty tz qw qx qy qz (query ground truth)");

  std::ofstream anchors(dir / "anchors.txt");
  if (!split.sequences.empty()) {
    for (const std::string& id : split.sequences.front()) anchors << id << '\n';
  }
  std::ofstream labels(dir / "labels.txt");
  labels << "# image_id outside_training_region\n";
  for (std::size_t i = 0; i < split.test_frames.size(); ++i) {
    labels << split.test_frames[i].image_id << ' ' << (split.test_outside[i] ? 1 : 0) << '\n';
  }
  std::ofstream region(dir / "region.txt");
  region.precision(17);
  region << "# training region min_x min_y min_z max_x max_y max_z\n";
  for (int k = 0; k < 3; ++k) region << split.training_region.min[k] << ' ';
  for (int k = 0; k < 3; ++k) region << split.training_region.max[k] << (k == 2 ? '\n' : ' ');
  if (!anchors || !labels || !region) throw Error(ErrorCode::kIo, "failed writing dataset in " + dir.string());
}

}  // namespace posegate
