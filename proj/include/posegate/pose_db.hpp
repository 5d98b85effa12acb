#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "posegate/descriptors.hpp"
#include "posegate/pose.hpp"
#include "posegate/pose_file.hpp"

namespace posegate {

// Maximum |norm - 1| accepted for a ground-truth quaternion before it is
// renormalized. Larger deviations usually mean the columns are not (w,x,y,z).
inline constexpr double kUnitQuaternionTolerance = 0.05;

struct TrainEntry {
  std::string image_id;
  Pose pose;  // ground truth, unit orientation
  std::shared_ptr<const DescriptorSet> descriptors;
};

// Training images with ground-truth poses, in ingestion order. Immutable once
// built; concurrent readers are safe.
class PoseDatabase {
 public:
  PoseDatabase() = default;
  explicit PoseDatabase(std::string scene_name) : scene_name_(std::move(scene_name)) {}

  // Throws kDuplicateImageId, or kNonUnitQuaternion when the orientation
  // is off unit length by more than kUnitQuaternionTolerance. The stored
  // orientation is renormalized unless renormalize is false (for reloading
  // poses that were already normalized).
  void Add(TrainEntry entry, bool renormalize = true);

  void AttachDescriptors(std::size_t index, std::shared_ptr<const DescriptorSet> descriptors);

  const std::string& scene_name() const { return scene_name_; }
  void set_scene_name(std::string name) { scene_name_ = std::move(name); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TrainEntry& entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<TrainEntry>& entries() const { return entries_; }

  std::optional<std::size_t> Find(const std::string& image_id) const;

  // Descriptors of entry i, or kMissingDescriptors.
  const DescriptorSet& DescriptorsOf(std::size_t i) const;

 private:
  std::string scene_name_;
  std::vector<TrainEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

PoseDatabase BuildPoseDatabase(const std::vector<PoseRecord>& records, std::string scene_name = {});
PoseDatabase IngestPoseFile(const std::filesystem::path& path, std::string scene_name = {});

struct RetrievedEntry {
  std::size_t entry_index = 0;
  std::string image_id;
  double position_distance = 0.0;
  double orientation_distance = 0.0;
  bool operator==(const RetrievedEntry&) const = default;
};

// Empty optional means no training pose lies within d_th.
using RetrievalResult = std::optional<RetrievedEntry>;

// Counts distance evaluations made by one retrieval.
struct RetrievalStats {
  std::size_t position_evaluations = 0;
  std::size_t orientation_evaluations = 0;
};

// Pose-only retrieval. Candidates are entries within d_th of the predicted
// position (inclusive); among them the smallest orientation distance wins and
// equal distances resolve to the later entry.
RetrievalResult RetrieveImage(const PoseDatabase& db, const Pose& predicted, double d_th,
                              const DistanceConfig& cfg = {}, RetrievalStats* stats = nullptr);

// Three-case similarity: 0 when the candidate is beyond d_th, 0 when it is
// in range but not the retrieval winner, else the good-match count.
std::size_t Similarity(const PoseDatabase& db, const DescriptorSet& query_descriptors,
                       const Pose& predicted, std::size_t candidate_index, double d_th,
                       const MatcherConfig& matcher = {}, const DistanceConfig& cfg = {});

void ValidateDistanceThreshold(double d_th);

}  // namespace posegate
