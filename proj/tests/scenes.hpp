// Hand-built databases shared by the tuner tests and the acceptance run.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "posegate/pose_db.hpp"
#include "posegate/random.hpp"
#include "posegate/synth.hpp"

namespace scenes {

inline std::shared_ptr<const posegate::DescriptorSet> SetOf(const posegate::SyntheticScene& scene,
                                                             const std::vector<std::size_t>& ids,
                                                             const std::string& name) {
  std::vector<std::uint8_t> data;
  for (std::size_t i : ids) {
    const auto& d = scene.landmarks[i].descriptor;
    data.insert(data.end(), d.begin(), d.end());
  }
  return std::make_shared<const posegate::DescriptorSet>(posegate::DescriptorSet::Binary(
      name, std::vector<posegate::Keypoint>(ids.size()), scene.descriptor_bytes(), data));
}

// Clusters of entries a few centimetres apart, cluster centres more than
// 2 * d_th apart. Every entry sees the same `shared` landmarks, entries of one
// cluster also share a cluster pool, and each entry has landmarks of its own.
// Far pairs therefore have exactly `shared` landmarks in common.
struct ClusteredDb {
  posegate::SyntheticScene scene;
  posegate::PoseDatabase db;
  std::vector<std::vector<std::size_t>> landmarks;  // per entry
};

inline ClusteredDb MakeClusteredDb(std::uint64_t seed, std::size_t shared, double d_th,
                                   std::size_t clusters = 6, std::size_t per_cluster = 5) {
  constexpr std::size_t kClusterPool = 15;
  constexpr std::size_t kOwn = 10;
  posegate::SceneConfig cfg;
  cfg.seed = seed;
  cfg.n_landmarks = shared + clusters * kClusterPool + clusters * per_cluster * kOwn;
  ClusteredDb out{posegate::GenerateScene(cfg), posegate::PoseDatabase("clustered"), {}};

  posegate::Rng rng(seed);
  std::size_t next = shared;
  for (std::size_t c = 0; c < clusters; ++c) {
    const std::size_t pool = next;
    next += kClusterPool;
    const Eigen::Vector3d centre(static_cast<double>(c) * 3.0 * d_th, 0.0, 0.0);
    for (std::size_t e = 0; e < per_cluster; ++e) {
      std::vector<std::size_t> ids;
      for (std::size_t i = 0; i < shared; ++i) ids.push_back(i);
      for (std::size_t i = 0; i < kClusterPool; ++i) ids.push_back(pool + i);
      for (std::size_t i = 0; i < kOwn; ++i) ids.push_back(next++);
      const std::string id = "c" + std::to_string(c) + "/e" + std::to_string(e);
      const Eigen::Vector3d p = centre + rng.NormalVector() * 0.02;
      out.db.Add({id, posegate::PoseFromRotation(p, rng.UniformRotation()), SetOf(out.scene, ids, id)});
      out.landmarks.push_back(std::move(ids));
    }
  }
  return out;
}

}  // namespace scenes
