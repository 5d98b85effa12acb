#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posegate/descriptors.hpp"
#include "posegate/error.hpp"
#include "posegate/pose.hpp"
#include "posegate/pose_db.hpp"

namespace posegate {

struct GateConfig {
  double d_th = 1.5;       // meters
  std::size_t gamma = 1;   // minimum good matches, >= 1
  MatcherConfig matcher;
  DistanceConfig distance;
};

void ValidateGateConfig(const GateConfig& cfg);

// Produces a pose estimate for a query image. Implementations must be safe
// to call from several threads.
class PosePredictor {
 public:
  virtual ~PosePredictor() = default;
  virtual Pose Predict(const std::string& image_id) const = 0;
};

enum class Verdict {
  kKeyframe,
  kRejectedNoCandidate,
  kRejectedInsufficientMatches,
};

std::string_view VerdictName(Verdict v);
std::optional<Verdict> ParseVerdict(std::string_view name);

// Microseconds per stage; empty when the stage did not run.
struct StageTimings {
  std::optional<double> predict_us;
  std::optional<double> retrieve_us;
  std::optional<double> extract_us;
  std::optional<double> match_us;
};

struct GateDecision {
  std::string image_id;
  Verdict verdict = Verdict::kRejectedNoCandidate;
  Pose predicted_pose;
  std::optional<std::size_t> retrieved_index;
  std::optional<std::string> retrieved_image_id;
  std::optional<std::size_t> good_match_count;
  StageTimings timing;

  bool is_keyframe() const { return verdict == Verdict::kKeyframe; }

  // Field-for-field equality ignoring timing.
  bool SameOutcome(const GateDecision& other) const;
};

// Supplies query descriptors on demand; called only after retrieval found a
// candidate, and its run time is reported as the extract stage.
using QueryDescriptorSource = std::function<std::shared_ptr<const DescriptorSet>()>;

// predict -> retrieve -> (extract) -> match -> compare with gamma.
GateDecision Gate(const std::string& query_image_id, const QueryDescriptorSource& query_descriptors,
                  const PosePredictor& predictor, const PoseDatabase& db, const GateConfig& cfg);

GateDecision Gate(const std::string& query_image_id, const DescriptorSet& query_descriptors,
                  const PosePredictor& predictor, const PoseDatabase& db, const GateConfig& cfg);

struct GateQuery {
  std::string image_id;
  QueryDescriptorSource descriptors;
};

struct BatchItem {
  std::string image_id;
  std::optional<GateDecision> decision;
  std::optional<Error> error;
};

// Order-preserving batch; per-query errors are captured in the item. Runs
// queries in parallel when OpenMP is available.
std::vector<BatchItem> GateBatch(std::span<const GateQuery> queries, const PosePredictor& predictor,
                                 const PoseDatabase& db, const GateConfig& cfg);

namespace reference {
std::vector<BatchItem> GateBatch(std::span<const GateQuery> queries, const PosePredictor& predictor,
                                 const PoseDatabase& db, const GateConfig& cfg);
}  // namespace reference

}  // namespace posegate
