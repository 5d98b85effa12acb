#include "posegate/eval.hpp"

#include <algorithm>
#include <cmath>

#include "posegate/error.hpp"

namespace posegate {

void ValidateTiers(const AccuracyTiers& t) {
  const bool nested = t.high.max_position_m < t.medium.max_position_m &&
                      t.medium.max_position_m < t.low.max_position_m &&
                      t.high.max_rotation_deg < t.medium.max_rotation_deg &&
                      t.medium.max_rotation_deg < t.low.max_rotation_deg;
  if (!nested) throw Error(ErrorCode::kInvalidArgument, "accuracy tiers must be strictly nested");
}

double LowerMedian(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

double Percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(pct / 100.0 * static_cast<double>(values.size()));
  const auto index = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(values.size()))) - 1;
  return values[index];
}

LatencyPercentiles SummarizeLatency(std::vector<double> samples) {
  LatencyPercentiles out;
  if (samples.empty()) return out;
  out.samples = samples.size();
  out.p50 = Percentile(samples, 50.0);
  out.p95 = Percentile(samples, 95.0);
  out.max = *std::max_element(samples.begin(), samples.end());
  return out;
}

EvalReport Evaluate(std::span<const GateDecision> decisions, const GroundTruth& ground_truth,
                    const AccuracyTiers& tiers, bool gated, std::string scene) {
  ValidateTiers(tiers);
  EvalReport report;
  report.scene = std::move(scene);
  report.gated = gated;
  report.n_total = decisions.size();

  std::vector<double> pos_errors;
  std::vector<double> rot_errors;
  std::size_t high = 0, medium = 0, low = 0;
  std::vector<double> predict, retrieve, extract, match;
  auto in_tier = [](const AccuracyTier& t, double p, double r) {
    return p <= t.max_position_m && r <= t.max_rotation_deg;
  };

  for (const GateDecision& d : decisions) {
    const auto it = ground_truth.find(d.image_id);
    if (it == ground_truth.end()) {
      throw Error(ErrorCode::kMissingGroundTruth, "no ground truth for " + d.image_id);
    }
    if (d.is_keyframe()) ++report.n_keyframes;
    if (d.timing.predict_us) predict.push_back(*d.timing.predict_us);
    if (d.timing.retrieve_us) retrieve.push_back(*d.timing.retrieve_us);
    if (d.timing.extract_us) extract.push_back(*d.timing.extract_us);
    if (d.timing.match_us) match.push_back(*d.timing.match_us);
    if (gated && !d.is_keyframe()) continue;

    const double p = PositionDistance(d.predicted_pose, it->second);
    const double r = RotationErrorDegrees(d.predicted_pose, it->second);
    pos_errors.push_back(p);
    rot_errors.push_back(r);
    if (in_tier(tiers.high, p, r)) ++high;
    if (in_tier(tiers.medium, p, r)) ++medium;
    if (in_tier(tiers.low, p, r)) ++low;
  }

  report.n_evaluated = pos_errors.size();
  report.keyframe_ratio =
      report.n_total == 0 ? 0.0 : static_cast<double>(report.n_keyframes) / report.n_total;
  if (!pos_errors.empty()) {
    report.median_pos_m = LowerMedian(pos_errors);
    report.median_ori_deg = LowerMedian(rot_errors);
    const double n = static_cast<double>(report.n_evaluated);
    report.pct_high = 100.0 * high / n;
    report.pct_medium = 100.0 * medium / n;
    report.pct_low = 100.0 * low / n;
  }
  auto summarize = [](std::vector<double>& v) -> std::optional<LatencyPercentiles> {
    if (v.empty()) return std::nullopt;
    return SummarizeLatency(std::move(v));
  };
  report.latency.predict = summarize(predict);
  report.latency.retrieve = summarize(retrieve);
  report.latency.extract = summarize(extract);
  report.latency.match = summarize(match);
  return report;
}

namespace {

MetricDelta Row(std::string name, std::optional<double> u, std::optional<double> g,
                bool lower_is_better) {
  MetricDelta row{std::move(name), u, g, std::nullopt, std::nullopt};
  if (u && g) {
    row.delta = *g - *u;
    if (*u != 0.0) row.improvement_pct = (lower_is_better ? (*u - *g) : (*g - *u)) / *u * 100.0;
  }
  return row;
}

}  // namespace

RunComparison CompareRuns(const EvalReport& ungated, const EvalReport& gated) {
  if (ungated.scene != gated.scene || ungated.n_total != gated.n_total) {
    throw Error(ErrorCode::kSceneMismatch, "reports cover different scenes or query sets");
  }
  RunComparison cmp;
  cmp.scene = gated.scene;
  cmp.ungated_keyframe_ratio = ungated.keyframe_ratio;
  cmp.gated_keyframe_ratio = gated.keyframe_ratio;
  cmp.rows.push_back(Row("median_pos_m", ungated.median_pos_m, gated.median_pos_m, true));
  cmp.rows.push_back(Row("median_ori_deg", ungated.median_ori_deg, gated.median_ori_deg, true));
  cmp.rows.push_back(Row("pct_high", ungated.pct_high, gated.pct_high, false));
  cmp.rows.push_back(Row("pct_medium", ungated.pct_medium, gated.pct_medium, false));
  cmp.rows.push_back(Row("pct_low", ungated.pct_low, gated.pct_low, false));
  return cmp;
}

}  // namespace posegate
