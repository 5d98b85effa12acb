#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "posegate/db_manifest.hpp"
#include "posegate/descriptor_cache.hpp"
#include "posegate/pose_file.hpp"
#include "posegate/random.hpp"
#include "posegate/synth.hpp"
#include "test_util.hpp"

using namespace posegate;

namespace {

std::size_t Hamming(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int bit = 0; bit < 8; ++bit) n += ((a[i] ^ b[i]) >> bit) & 1;
  }
  return n;
}

std::size_t Intersection(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

SceneConfig Small(std::uint64_t seed, std::size_t n) {
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.n_landmarks = n;
  return cfg;
}

}  // namespace

TEST_CASE("descriptor spacing bounds") {
  CHECK(MinDescriptorDistance(256) == 103);
  CHECK(MaxDescriptorDistance(256) == 147);
  // an unshared row never passes the 0.7 ratio test, and hi is the largest such bound
  CHECK(MinDescriptorDistance(256) >= 0.7 * MaxDescriptorDistance(256));
  CHECK(MinDescriptorDistance(256) < 0.7 * (MaxDescriptorDistance(256) + 1));
}

TEST_CASE("seed 42 scene keeps every descriptor pair at least 40 percent apart") {
  const SyntheticScene scene = GenerateScene(Small(42, 500));
  REQUIRE(scene.landmarks.size() == 500);
  std::size_t lo = 256;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    CHECK(scene.config.box.Contains(scene.landmarks[i].position));
    for (std::size_t j = i + 1; j < 500; ++j) {
      const std::size_t d = Hamming(scene.landmarks[i].descriptor, scene.landmarks[j].descriptor);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  CHECK(lo >= 103);
  CHECK(hi <= 147);
}

TEST_CASE("scene and split generation are deterministic") {
  const SyntheticScene a = GenerateScene(Small(7, 300));
  const SyntheticScene b = GenerateScene(Small(7, 300));
  for (std::size_t i = 0; i < a.landmarks.size(); ++i) {
    CHECK(a.landmarks[i].position == b.landmarks[i].position);
    CHECK(a.landmarks[i].descriptor == b.landmarks[i].descriptor);
  }
  SplitConfig cfg;
  cfg.n_train = 60;
  cfg.n_test = 30;
  cfg.coverage_bias = 0.3;
  const SyntheticSplit s1 = GenerateSplit(a, cfg);
  const SyntheticSplit s2 = GenerateSplit(b, cfg);
  REQUIRE(s1.test_frames.size() == s2.test_frames.size());
  for (std::size_t i = 0; i < s1.test_frames.size(); ++i) {
    CHECK(s1.test_frames[i].image_id == s2.test_frames[i].image_id);
    CHECK(s1.test_frames[i].true_pose == s2.test_frames[i].true_pose);
    CHECK(s1.test_frames[i].descriptor_set == s2.test_frames[i].descriptor_set);
  }
  const SyntheticScene c = GenerateScene(Small(8, 300));
  CHECK_FALSE(c.landmarks[0].position == a.landmarks[0].position);
}

TEST_CASE("rendered frames list exactly the visible landmarks") {
  const SyntheticScene scene = GenerateScene(Small(5, 400));
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Pose pose = PoseFromRotation(rng.InBox(scene.config.box.min, scene.config.box.max),
                                       rng.UniformRotation());
    const SyntheticFrame f = RenderFrame(scene, pose, "f");
    std::vector<std::uint32_t> want;
    const Eigen::Matrix3d r = pose.rotation().toRotationMatrix();
    const double cos_half = std::cos(scene.config.fov_half_angle_deg * M_PI / 180.0);
    for (std::uint32_t i = 0; i < scene.landmarks.size(); ++i) {
      const Eigen::Vector3d v = scene.landmarks[i].position - pose.position();
      const double dist = v.norm();
      if (dist <= 0 || dist > scene.config.max_view_distance_m) continue;
      if (r.col(2).dot(v) / dist >= cos_half) want.push_back(i);
    }
    CHECK(f.visible_landmark_ids == want);
    CHECK(f.descriptor_set.size() == want.size());
    for (const Keypoint& k : f.descriptor_set.keypoints()) {
      CHECK(k.x >= 0.0f);
      CHECK(k.x < 380.0f);
      CHECK(k.y >= 0.0f);
      CHECK(k.y < 380.0f);
    }
  }
}

TEST_CASE("match count equals the shared landmark count") {
  const SyntheticScene scene = GenerateScene(Small(11, 600));
  SplitConfig cfg;
  cfg.n_train = 100;
  cfg.n_test = 60;
  const SyntheticSplit split = GenerateSplit(scene, cfg);
  std::vector<const SyntheticFrame*> frames;
  for (const auto& f : split.train_frames) frames.push_back(&f);
  for (const auto& f : split.test_frames) frames.push_back(&f);
  Rng rng(11);
  std::size_t nonzero = 0;
  for (int t = 0; t < 1000; ++t) {
    const SyntheticFrame& a = *frames[rng.Index(frames.size())];
    const SyntheticFrame& b = *frames[rng.Index(frames.size())];
    const std::size_t shared = Intersection(a.visible_landmark_ids, b.visible_landmark_ids);
    const std::size_t want = b.descriptor_set.size() < 2 ? 0 : shared;
    REQUIRE(MatchFeatures(a.descriptor_set, b.descriptor_set).good_match_count == want);
    nonzero += want > 0;
  }
  CHECK(nonzero > 100);
}

TEST_CASE("coverage bias controls the share of outside queries") {
  const SyntheticScene scene = GenerateScene(Small(3, 300));
  for (double bias : {0.0, 0.3, 1.0}) {
    SplitConfig cfg;
    cfg.n_train = 80;
    cfg.n_test = 50;
    cfg.coverage_bias = bias;
    const SyntheticSplit split = GenerateSplit(scene, cfg);
    CHECK(split.train_frames.size() == 80);
    CHECK(split.test_frames.size() == 50);
    const auto outside = std::count(split.test_outside.begin(), split.test_outside.end(), true);
    CHECK(outside == std::lround(bias * 50));
    for (const auto& f : split.train_frames) CHECK(split.training_region.Contains(f.true_pose.position()));
    for (std::size_t i = 0; i < split.test_frames.size(); ++i) {
      const Eigen::Vector3d& p = split.test_frames[i].true_pose.position();
      CHECK(split.training_region.Contains(p) == !split.test_outside[i]);
      CHECK(scene.config.box.Contains(p));
    }
  }
}

TEST_CASE("written datasets reload") {
  TempDir dir;
  const SyntheticScene scene = GenerateScene(Small(4, 200));
  SplitConfig cfg;
  cfg.n_train = 30;
  cfg.n_test = 10;
  cfg.coverage_bias = 0.3;
  const SyntheticSplit split = GenerateSplit(scene, cfg);
  WriteSyntheticDataset(split, dir.path());
  const auto train = ReadPoseFile(dir / "train.txt");
  REQUIRE(train.size() == 30);
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(train[i].image_id == split.train_frames[i].image_id);
    CHECK(train[i].pose == split.train_frames[i].true_pose);
  }
  const auto& f = split.test_frames.front();
  CHECK(ReadDescriptorCache(dir / "descriptors" / DescriptorCacheFileName(f.image_id), f.image_id) ==
        f.descriptor_set);
  BuildDatabaseFile(dir / "train.txt", dir / "descriptors", dir / "db.json", "synthetic");
  const PoseDatabase db = LoadDatabaseFile(dir / "db.json");
  REQUIRE(db.size() == 30);
  CHECK(db.scene_name() == "synthetic");
  for (std::size_t i = 0; i < db.size(); ++i) {
    CHECK(db.entry(i).pose == split.db.entry(i).pose);
    CHECK(db.DescriptorsOf(i) == split.db.DescriptorsOf(i));
  }
  CHECK(ManifestDescriptorDir(dir / "db.json").has_value());
}
