#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "posegate/pose_db.hpp"

namespace posegate {

// On-disk database: a JSON manifest listing every entry's ground-truth pose
// and the path of its descriptor cache (relative to the manifest), or null.
//   {"format":"posegate-db","version":1,"scene":...,
//    "descriptor_dir":...,
//    "entries":[{"image_id":...,"pose":[tx,ty,tz,qw,qx,qy,qz],"descriptors":...}]}

struct BuildDbSummary {
  std::size_t entries = 0;
  std::size_t with_descriptors = 0;
};

// Ingests the pose file, links <descriptor_dir>/<cache name> for every entry
// whose cache exists, and writes the manifest.
BuildDbSummary BuildDatabaseFile(const std::filesystem::path& pose_file,
                                 const std::optional<std::filesystem::path>& descriptor_dir,
                                 const std::filesystem::path& out, std::string scene_name = {});

// Loads the manifest and every referenced descriptor cache.
PoseDatabase LoadDatabaseFile(const std::filesystem::path& manifest);

// Descriptor directory recorded at build time, resolved against the
// manifest location.
std::optional<std::filesystem::path> ManifestDescriptorDir(const std::filesystem::path& manifest);

}  // namespace posegate
