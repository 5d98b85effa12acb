#include "posegate/json_io.hpp"

#include <fstream>

#include "posegate/error.hpp"

namespace posegate {

using nlohmann::json;

namespace {

json Optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ToJson(const std::optional<LatencyPercentiles>& p) {
  if (!p) return nullptr;
  return {{"p50", p->p50}, {"p95", p->p95}, {"max", p->max}, {"samples", p->samples}};
}

json ToJson(const LatencyPercentiles& p) { return ToJson(std::optional<LatencyPercentiles>(p)); }

}  // namespace

json ToJson(const GateDecision& d) {
  json j;
  j["image_id"] = d.image_id;
  j["verdict"] = std::string(VerdictName(d.verdict));
  j["retrieved_id"] = d.retrieved_image_id ? json(*d.retrieved_image_id) : json(nullptr);
  j["match_count"] = d.good_match_count ? json(*d.good_match_count) : json(nullptr);
  j["pred_pose"] = d.predicted_pose.ToArray();
  j["timings_us"] = {{"predict", Optional(d.timing.predict_us)},
                     {"retrieve", Optional(d.timing.retrieve_us)},
                     {"extract", Optional(d.timing.extract_us)},
                     {"match", Optional(d.timing.match_us)}};
  return j;
}

json ToJson(const TuneReport& r) {
  json pairs = json::array();
  for (const FarPair& p : r.pairs) {
    pairs.push_back({{"anchor", p.anchor_id},
                     {"far", p.far_id},
                     {"dist_pos", p.position_distance},
                     {"dist_ori", p.orientation_distance},
                     {"matches", p.good_match_count}});
  }
  return {{"scene", r.scene},         {"d_th", r.d_th},
          {"ratio", r.ratio},         {"pairs", pairs},
          {"max_matches", r.max_matches}, {"suggested_gamma", r.suggested_gamma}};
}

TuneReport TuneReportFromJson(const json& j) {
  TuneReport r;
  r.scene = j.at("scene").get<std::string>();
  r.d_th = j.at("d_th").get<double>();
  r.ratio = j.at("ratio").get<double>();
  for (const json& p : j.at("pairs")) {
    FarPair fp;
    fp.anchor_id = p.at("anchor").get<std::string>();
    fp.far_id = p.at("far").get<std::string>();
    fp.position_distance = p.at("dist_pos").get<double>();
    fp.orientation_distance = p.at("dist_ori").get<double>();
    fp.good_match_count = p.at("matches").get<std::size_t>();
    r.pairs.push_back(std::move(fp));
  }
  r.max_matches = j.at("max_matches").get<std::size_t>();
  r.suggested_gamma = j.at("suggested_gamma").get<std::size_t>();
  return r;
}

json ToJson(const EvalReport& r) {
  return {{"scene", r.scene},
          {"gated", r.gated},
          {"n_total", r.n_total},
          {"n_keyframes", r.n_keyframes},
          {"n_evaluated", r.n_evaluated},
          {"keyframe_ratio", r.keyframe_ratio},
          {"median_pos_m", Optional(r.median_pos_m)},
          {"median_ori_deg", Optional(r.median_ori_deg)},
          {"pct_high", r.pct_high},
          {"pct_medium", r.pct_medium},
          {"pct_low", r.pct_low},
          {"per_stage_latency_us",
           {{"predict", ToJson(r.latency.predict)},
            {"retrieve", ToJson(r.latency.retrieve)},
            {"extract", ToJson(r.latency.extract)},
            {"match", ToJson(r.latency.match)}}}};
}

json ToJson(const RunComparison& c) {
  json rows = json::array();
  for (const MetricDelta& m : c.rows) {
    rows.push_back({{"metric", m.metric},
                    {"ungated", Optional(m.ungated)},
                    {"gated", Optional(m.gated)},
                    {"delta", Optional(m.delta)},
                    {"improvement_pct", Optional(m.improvement_pct)}});
  }
  return {{"scene", c.scene},
          {"ungated_keyframe_ratio", c.ungated_keyframe_ratio},
          {"gated_keyframe_ratio", c.gated_keyframe_ratio},
          {"rows", rows}};
}

json ToJson(const BenchReport& r) {
  return {{"db_size", r.config.db_size},
          {"descriptors", r.config.n_descriptors},
          {"dim", r.config.dim},
          {"repetitions", r.config.repetitions},
          {"parallel_match", r.config.parallel_match},
          {"retrieve_us", ToJson(r.retrieve)},
          {"match_us", ToJson(r.match)},
          {"combined_us", ToJson(r.combined)}};
}

void WriteJsonFile(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace posegate
