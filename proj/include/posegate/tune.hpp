#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posegate/descriptors.hpp"
#include "posegate/pose_db.hpp"

namespace posegate {

struct FarPair {
  std::string anchor_id;
  std::string far_id;
  std::size_t anchor_index = 0;
  std::size_t far_index = 0;
  double position_distance = 0.0;  // strictly greater than d_th
  double orientation_distance = 0.0;
  std::size_t good_match_count = 0;
};

struct TuneReport {
  std::string scene;
  double d_th = 0.0;
  double ratio = 0.0;
  std::vector<FarPair> pairs;
  std::size_t max_matches = 0;
  std::size_t suggested_gamma = 1;  // max(1, max_matches)
};

// Among entries strictly farther than d_th from the anchor, the one with the
// largest orientation distance; equal distances resolve to the later entry.
// good_match_count is left at zero.
std::optional<FarPair> SampleFarPair(const PoseDatabase& db, std::size_t anchor_index, double d_th,
                                     const DistanceConfig& cfg = {});

// Builds the far pair of every anchor, matches each pair and suggests gamma
// at the largest count observed. Anchors are processed in parallel.
TuneReport TuneGamma(const PoseDatabase& db, std::span<const std::string> anchor_ids, double d_th,
                     const MatcherConfig& matcher = {}, const DistanceConfig& cfg = {});

namespace reference {
TuneReport TuneGamma(const PoseDatabase& db, std::span<const std::string> anchor_ids, double d_th,
                     const MatcherConfig& matcher = {}, const DistanceConfig& cfg = {});
}  // namespace reference

}  // namespace posegate
