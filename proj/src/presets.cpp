#include "posegate/presets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>

namespace posegate {

namespace {

constexpr std::array<ScenePreset, 20> kPresets = {{
    {"7scenes", "chess", "dfnet", 0.15, 30, 0.7},
    {"7scenes", "fire", "dfnet", 0.30, 40, 0.7},
    {"7scenes", "heads", "dfnet", 0.20, 30, 0.7},
    {"7scenes", "office", "dfnet", 0.20, 30, 0.7},
    {"7scenes", "pumpkin", "dfnet", 0.20, 40, 0.7},
    {"7scenes", "stairs", "dfnet", 0.20, 20, 0.7},
    {"7scenes", "chess", "dfnet_dm", 0.15, 30, 0.7},
    {"7scenes", "fire", "dfnet_dm", 0.30, 40, 0.7},
    {"7scenes", "heads", "dfnet_dm", 0.20, 30, 0.7},
    {"7scenes", "office", "dfnet_dm", 0.25, 20, 0.7},
    {"7scenes", "pumpkin", "dfnet_dm", 0.20, 20, 0.7},
    {"7scenes", "stairs", "dfnet_dm", 0.25, 20, 0.7},
    // Hospital has repetitive structure and uses the stricter ratio.
    {"cambridge", "kings", "ms-t", 1.5, 25, 0.7},
    {"cambridge", "hospital", "ms-t", 1.5, 15, 0.5},
    {"cambridge", "shop", "ms-t", 1.5, 20, 0.7},
    {"cambridge", "church", "ms-t", 1.5, 30, 0.7},
    {"cambridge", "kings", "dfnet_dm", 2.0, 30, 0.7},
    {"cambridge", "hospital", "dfnet_dm", 2.0, 15, 0.5},
    {"cambridge", "shop", "dfnet_dm", 1.5, 20, 0.7},
    {"cambridge", "church", "dfnet_dm", 1.5, 30, 0.7},
}};

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::span<const ScenePreset> ScenePresets() { return kPresets; }

std::optional<ScenePreset> FindPreset(std::string_view key) {
  const std::string k = Lower(key);
  const std::size_t slash = k.find('/');
  const std::string scene = k.substr(0, slash);
  const std::string model = slash == std::string::npos ? std::string() : k.substr(slash + 1);
  for (const ScenePreset& p : kPresets) {
    if (p.scene == scene && (model.empty() || p.model == model)) return p;
  }
  return std::nullopt;
}

}  // namespace posegate
