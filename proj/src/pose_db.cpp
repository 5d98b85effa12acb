#include "posegate/pose_db.hpp"

#include <cmath>
#include <limits>

#include "posegate/error.hpp"

namespace posegate {

void PoseDatabase::Add(TrainEntry entry, bool renormalize) {
  const double norm = entry.pose.orientation_norm();
  if (std::abs(norm - 1.0) > kUnitQuaternionTolerance) {
    throw Error(ErrorCode::kNonUnitQuaternion,
                "quaternion norm " + std::to_string(norm) + " for " + entry.image_id +
                    " is not unit length; expected column order qw qx qy qz");
  }
  if (index_.contains(entry.image_id)) {
    throw Error(ErrorCode::kDuplicateImageId, "duplicate image id " + entry.image_id);
  }
  if (renormalize) entry.pose = entry.pose.Normalized();
  index_.emplace(entry.image_id, entries_.size());
  entries_.push_back(std::move(entry));
}

void PoseDatabase::AttachDescriptors(std::size_t index,
                                     std::shared_ptr<const DescriptorSet> descriptors) {
  entries_.at(index).descriptors = std::move(descriptors);
}

std::optional<std::size_t> PoseDatabase::Find(const std::string& image_id) const {
  const auto it = index_.find(image_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const DescriptorSet& PoseDatabase::DescriptorsOf(std::size_t i) const {
  const TrainEntry& e = entries_.at(i);
  if (!e.descriptors) {
    throw Error(ErrorCode::kMissingDescriptors, "no descriptors for " + e.image_id);
  }
  return *e.descriptors;
}

PoseDatabase BuildPoseDatabase(const std::vector<PoseRecord>& records, std::string scene_name) {
  PoseDatabase db(std::move(scene_name));
  for (const PoseRecord& r : records) {
    try {
      db.Add({r.image_id, r.pose, nullptr});
    } catch (const Error& e) {
      if (r.line == 0) throw;
      throw Error(e.code(), "line " + std::to_string(r.line) + ": " + e.what());
    }
  }
  return db;
}

PoseDatabase IngestPoseFile(const std::filesystem::path& path, std::string scene_name) {
  if (scene_name.empty()) scene_name = path.stem().string();
  return BuildPoseDatabase(ReadPoseFile(path), std::move(scene_name));
}

void ValidateDistanceThreshold(double d_th) {
  if (!(d_th > 0.0) || !std::isfinite(d_th)) {
    throw Error(ErrorCode::kInvalidArgument, "d_th must be a positive finite distance");
  }
}

RetrievalResult RetrieveImage(const PoseDatabase& db, const Pose& predicted, double d_th,
                              const DistanceConfig& cfg, RetrievalStats* stats) {
  ValidateDistanceThreshold(d_th);
  const Eigen::Vector4d unit_pred = NormalizeQuaternion(predicted.orientation());
  const Eigen::Vector3d& x = predicted.position();

  RetrievalStats local;
  double best = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> closest;
  double closest_position = 0.0;
  const std::vector<TrainEntry>& entries = db.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double dp = PositionDistance(x, entries[i].pose.position());
    ++local.position_evaluations;
    if (!(dp <= d_th)) continue;
    const double dq = UnitOrientationDistance(unit_pred, entries[i].pose.orientation(), cfg);
    ++local.orientation_evaluations;
    if (dq <= best) {
      best = dq;
      closest = i;
      closest_position = dp;
    }
  }
  if (stats != nullptr) *stats = local;
  if (!closest) return std::nullopt;
  return RetrievedEntry{*closest, entries[*closest].image_id, closest_position, best};
}

std::size_t Similarity(const PoseDatabase& db, const DescriptorSet& query_descriptors,
                       const Pose& predicted, std::size_t candidate_index, double d_th,
                       const MatcherConfig& matcher, const DistanceConfig& cfg) {
  ValidateDistanceThreshold(d_th);
  const TrainEntry& candidate = db.entry(candidate_index);
  if (PositionDistance(predicted, candidate.pose) > d_th) return 0;
  const RetrievalResult winner = RetrieveImage(db, predicted, d_th, cfg);
  if (!winner || winner->entry_index != candidate_index) return 0;
  return MatchFeatures(query_descriptors, db.DescriptorsOf(candidate_index), matcher)
      .good_match_count;
}

}  // namespace posegate
