#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "posegate/gate.hpp"
#include "posegate/pose.hpp"

namespace posegate {

struct AccuracyTier {
  double max_position_m;
  double max_rotation_deg;
};

// A frame is in a tier when both its position and rotation errors are
// within the tier's bounds.
struct AccuracyTiers {
  AccuracyTier high{0.25, 2.0};
  AccuracyTier medium{0.5, 5.0};
  AccuracyTier low{5.0, 10.0};
};

void ValidateTiers(const AccuracyTiers& tiers);

struct LatencyPercentiles {
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
};

struct StageLatency {
  std::optional<LatencyPercentiles> predict;
  std::optional<LatencyPercentiles> retrieve;
  std::optional<LatencyPercentiles> extract;
  std::optional<LatencyPercentiles> match;
};

struct EvalReport {
  std::string scene;
  bool gated = false;
  std::size_t n_total = 0;
  std::size_t n_keyframes = 0;
  std::size_t n_evaluated = 0;  // keyframes when gated, all frames otherwise
  double keyframe_ratio = 0.0;
  std::optional<double> median_pos_m;    // empty when nothing was evaluated
  std::optional<double> median_ori_deg;
  double pct_high = 0.0;  // percentages in [0, 100]
  double pct_medium = 0.0;
  double pct_low = 0.0;
  StageLatency latency;
};

using GroundTruth = std::unordered_map<std::string, Pose>;

// Errors per frame are position distance and geodesic rotation error.
// Throws kMissingGroundTruth for a decision without a ground-truth pose.
EvalReport Evaluate(std::span<const GateDecision> decisions, const GroundTruth& ground_truth,
                    const AccuracyTiers& tiers, bool gated, std::string scene = {});

// Lower median (element (n-1)/2 of the sorted values). Throws on empty input.
double LowerMedian(std::vector<double> values);

// Nearest-rank percentile.
double Percentile(std::vector<double> values, double pct);
LatencyPercentiles SummarizeLatency(std::vector<double> samples_us);

struct MetricDelta {
  std::string metric;
  std::optional<double> ungated;
  std::optional<double> gated;
  std::optional<double> delta;            // gated - ungated
  std::optional<double> improvement_pct;  // relative, positive means gating helped
};

struct RunComparison {
  std::string scene;
  double ungated_keyframe_ratio = 0.0;
  double gated_keyframe_ratio = 0.0;
  std::vector<MetricDelta> rows;
};

// Throws kSceneMismatch unless both reports cover the same scene and queries.
RunComparison CompareRuns(const EvalReport& ungated, const EvalReport& gated);

}  // namespace posegate
