#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posegate/pose.hpp"

namespace posegate {

// One line of a pose or prediction file:
//   image_id tx ty tz qw qx qy qz
// '#' starts a comment line, blank lines are skipped.
struct PoseRecord {
  std::string image_id;
  Pose pose;
  std::size_t line = 0;  // 1-based source line, 0 when not read from text

  bool operator==(const PoseRecord& o) const { return image_id == o.image_id && pose == o.pose; }
};

// Orientation is only required to be non-zero here; database ingestion
// applies the stricter unit-norm check.
std::vector<PoseRecord> ParsePoseText(std::string_view text);
std::vector<PoseRecord> ReadPoseFile(const std::filesystem::path& path);

// Shortest round-trip decimal formatting, so parse(format(x)) == x exactly.
std::string FormatPoseRecords(std::span<const PoseRecord> records);
void WritePoseFile(const std::filesystem::path& path, std::span<const PoseRecord> records,
                   std::string_view header_comment = {});

std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace posegate
