#include "posegate/tune.hpp"

#include <algorithm>
#include <exception>

#include "posegate/error.hpp"

namespace posegate {

std::optional<FarPair> SampleFarPair(const PoseDatabase& db, std::size_t anchor_index, double d_th,
                                     const DistanceConfig& cfg) {
  ValidateDistanceThreshold(d_th);
  const TrainEntry& anchor = db.entry(anchor_index);
  const Eigen::Vector4d unit_anchor = NormalizeQuaternion(anchor.pose.orientation());

  std::optional<FarPair> best;
  double best_orientation = 0.0;
  for (std::size_t j = 0; j < db.size(); ++j) {
    const TrainEntry& other = db.entry(j);
    const double dp = PositionDistance(anchor.pose, other.pose);
    if (!(dp > d_th)) continue;
    const double dq = UnitOrientationDistance(unit_anchor, other.pose.orientation(), cfg);
    if (dq >= best_orientation) {
      best_orientation = dq;
      best = FarPair{anchor.image_id, other.image_id, anchor_index, j, dp, dq, 0};
    }
  }
  return best;
}

namespace {

TuneReport Tune(const PoseDatabase& db, std::span<const std::string> anchor_ids, double d_th,
                const MatcherConfig& matcher, const DistanceConfig& cfg, bool parallel) {
  ValidateDistanceThreshold(d_th);
  ValidateMatcherConfig(matcher);
  std::vector<std::size_t> anchors;
  anchors.reserve(anchor_ids.size());
  for (const std::string& id : anchor_ids) {
    const auto index = db.Find(id);
    if (!index) throw Error(ErrorCode::kInvalidArgument, "anchor " + id + " is not in the database");
    anchors.push_back(*index);
  }

  std::vector<std::optional<FarPair>> slots(anchors.size());
  std::vector<std::exception_ptr> failures(anchors.size());
  const long long n = static_cast<long long>(anchors.size());
  (void)parallel;
#ifdef POSEGATE_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
#endif
  for (long long ii = 0; ii < n; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    try {
      std::optional<FarPair> pair = SampleFarPair(db, anchors[i], d_th, cfg);
      if (pair) {
        pair->good_match_count =
            MatchFeatures(db.DescriptorsOf(pair->anchor_index), db.DescriptorsOf(pair->far_index),
                          matcher)
                .good_match_count;
      }
      slots[i] = std::move(pair);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const std::exception_ptr& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  TuneReport report;
  report.scene = db.scene_name();
  report.d_th = d_th;
  report.ratio = matcher.ratio;
  for (std::optional<FarPair>& slot : slots) {
    if (!slot) continue;
    report.max_matches = std::max(report.max_matches, slot->good_match_count);
    report.pairs.push_back(std::move(*slot));
  }
  report.suggested_gamma = std::max<std::size_t>(1, report.max_matches);
  return report;
}

}  // namespace

TuneReport TuneGamma(const PoseDatabase& db, std::span<const std::string> anchor_ids, double d_th,
                     const MatcherConfig& matcher, const DistanceConfig& cfg) {
  return Tune(db, anchor_ids, d_th, matcher, cfg, true);
}

namespace reference {

TuneReport TuneGamma(const PoseDatabase& db, std::span<const std::string> anchor_ids, double d_th,
                     const MatcherConfig& matcher, const DistanceConfig& cfg) {
  return Tune(db, anchor_ids, d_th, matcher, cfg, false);
}

}  // namespace reference

}  // namespace posegate
