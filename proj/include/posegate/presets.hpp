#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace posegate {

// Per-scene thresholds for the public 7Scenes and Cambridge Landmarks
// benchmarks. Indoor scenes use d_th of 0.1-0.3 m, outdoor 1-2 m.
struct ScenePreset {
  std::string_view dataset;
  std::string_view scene;
  std::string_view model;
  double d_th;
  std::size_t gamma;
  double ratio;
};

std::span<const ScenePreset> ScenePresets();

// Key is "scene" or "scene/model", case-insensitive. Without a model the
// first listed model for the scene is used.
std::optional<ScenePreset> FindPreset(std::string_view key);

}  // namespace posegate
