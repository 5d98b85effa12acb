#include "posegate/db_manifest.hpp"

#include <array>
#include <fstream>

#include <nlohmann/json.hpp>

#include "posegate/descriptor_cache.hpp"
#include "posegate/error.hpp"
#include "posegate/json_io.hpp"
#include "posegate/pose_file.hpp"

namespace posegate {

namespace fs = std::filesystem;
using nlohmann::json;

BuildDbSummary BuildDatabaseFile(const fs::path& pose_file, const std::optional<fs::path>& descriptor_dir,
                                 const fs::path& out, std::string scene_name) {
  const PoseDatabase db = IngestPoseFile(pose_file, std::move(scene_name));
  const fs::path base = fs::absolute(out).parent_path();
  BuildDbSummary summary;
  json entries = json::array();
  for (const TrainEntry& e : db.entries()) {
    json item = {{"image_id", e.image_id}, {"pose", e.pose.ToArray()}, {"descriptors", nullptr}};
    if (descriptor_dir) {
      const fs::path cache = *descriptor_dir / DescriptorCacheFileName(e.image_id);
      if (fs::exists(cache)) {
        item["descriptors"] = fs::proximate(fs::absolute(cache), base).generic_string();
        ++summary.with_descriptors;
      }
    }
    entries.push_back(std::move(item));
    ++summary.entries;
  }
  const json dir = descriptor_dir
                       ? json(fs::proximate(fs::absolute(*descriptor_dir), base).generic_string())
                       : json(nullptr);
  WriteJsonFile(out, {{"format", "posegate-db"}, {"version", 1}, {"scene", db.scene_name()},
                      {"descriptor_dir", dir}, {"entries", entries}});
  return summary;
}

namespace {

json ParseManifest(const fs::path& manifest) {
  try {
    return json::parse(ReadTextFile(manifest));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, manifest.string() + ": " + e.what());
  }
}

}  // namespace

std::optional<fs::path> ManifestDescriptorDir(const fs::path& manifest) {
  const json j = ParseManifest(manifest);
  if (!j.contains("descriptor_dir") || j["descriptor_dir"].is_null()) return std::nullopt;
  fs::path dir = j["descriptor_dir"].get<std::string>();
  if (dir.is_relative()) dir = fs::absolute(manifest).parent_path() / dir;
  return dir;
}

PoseDatabase LoadDatabaseFile(const fs::path& manifest) {
  const json j = ParseManifest(manifest);
  try {
    if (j.at("format").get<std::string>() != "posegate-db" || j.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kParse, manifest.string() + ": not a posegate-db v1 manifest");
    }
    const fs::path base = fs::absolute(manifest).parent_path();
    PoseDatabase db(j.at("scene").get<std::string>());
    for (const json& e : j.at("entries")) {
      const std::string id = e.at("image_id").get<std::string>();
      const auto values = e.at("pose").get<std::array<double, 7>>();
      db.Add({id, Pose::FromArray(values), nullptr}, false);
      const json& ref = e.at("descriptors");
      if (!ref.is_null()) {
        fs::path path = ref.get<std::string>();
        if (path.is_relative()) path = base / path;
        db.AttachDescriptors(db.size() - 1,
                             std::make_shared<const DescriptorSet>(ReadDescriptorCache(path, id)));
      }
    }
    return db;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, manifest.string() + ": " + e.what());
  }
}

}  // namespace posegate
