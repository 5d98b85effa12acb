#include "posegate/gate.hpp"

#include <chrono>
#include <exception>

namespace posegate {

namespace {

using Clock = std::chrono::steady_clock;

double MicrosSince(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

BatchItem RunOne(const GateQuery& q, const PosePredictor& predictor, const PoseDatabase& db,
                 const GateConfig& cfg) {
  BatchItem item{q.image_id, std::nullopt, std::nullopt};
  try {
    item.decision = Gate(q.image_id, q.descriptors, predictor, db, cfg);
  } catch (const Error& e) {
    item.error = e;
  } catch (const std::exception& e) {
    item.error = Error(ErrorCode::kInvalidArgument, e.what());
  }
  return item;
}

std::vector<BatchItem> RunBatch(std::span<const GateQuery> queries, const PosePredictor& predictor,
                                const PoseDatabase& db, const GateConfig& cfg, bool parallel) {
  ValidateGateConfig(cfg);
  std::vector<BatchItem> items(queries.size());
  const long long n = static_cast<long long>(queries.size());
  (void)parallel;
#ifdef POSEGATE_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
  for (long long i = 0; i < n; ++i) {
    items[static_cast<std::size_t>(i)] =
        RunOne(queries[static_cast<std::size_t>(i)], predictor, db, cfg);
  }
  return items;
}

}  // namespace

void ValidateGateConfig(const GateConfig& cfg) {
  ValidateDistanceThreshold(cfg.d_th);
  if (cfg.gamma < 1) throw Error(ErrorCode::kInvalidArgument, "gamma must be at least 1");
  ValidateMatcherConfig(cfg.matcher);
}

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kKeyframe: return "keyframe";
    case Verdict::kRejectedNoCandidate: return "rejected_no_candidate";
    case Verdict::kRejectedInsufficientMatches: return "rejected_insufficient_matches";
  }
  return "unknown";
}

std::optional<Verdict> ParseVerdict(std::string_view name) {
  for (Verdict v : {Verdict::kKeyframe, Verdict::kRejectedNoCandidate,
                    Verdict::kRejectedInsufficientMatches}) {
    if (VerdictName(v) == name) return v;
  }
  return std::nullopt;
}

bool GateDecision::SameOutcome(const GateDecision& o) const {
  return image_id == o.image_id && verdict == o.verdict && predicted_pose == o.predicted_pose &&
         retrieved_index == o.retrieved_index && retrieved_image_id == o.retrieved_image_id &&
         good_match_count == o.good_match_count;
}

GateDecision Gate(const std::string& query_image_id, const QueryDescriptorSource& query_descriptors,
                  const PosePredictor& predictor, const PoseDatabase& db, const GateConfig& cfg) {
  ValidateGateConfig(cfg);
  GateDecision decision;
  decision.image_id = query_image_id;

  auto start = Clock::now();
  try {
    decision.predicted_pose = predictor.Predict(query_image_id);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kPredictionFailure,
                "prediction failed for " + query_image_id + ": " + e.what());
  }
  decision.timing.predict_us = MicrosSince(start);

  start = Clock::now();
  const RetrievalResult retrieved = RetrieveImage(db, decision.predicted_pose, cfg.d_th, cfg.distance);
  decision.timing.retrieve_us = MicrosSince(start);
  if (!retrieved) {
    decision.verdict = Verdict::kRejectedNoCandidate;
    return decision;
  }
  decision.retrieved_index = retrieved->entry_index;
  decision.retrieved_image_id = retrieved->image_id;
  const DescriptorSet& train = db.DescriptorsOf(retrieved->entry_index);

  start = Clock::now();
  if (!query_descriptors) {
    throw Error(ErrorCode::kMissingDescriptors, "no descriptor source for query " + query_image_id);
  }
  const std::shared_ptr<const DescriptorSet> query = query_descriptors();
  if (!query) {
    throw Error(ErrorCode::kMissingDescriptors, "no descriptors for query " + query_image_id);
  }
  decision.timing.extract_us = MicrosSince(start);

  start = Clock::now();
  const std::size_t count = MatchFeatures(*query, train, cfg.matcher).good_match_count;
  decision.timing.match_us = MicrosSince(start);

  decision.good_match_count = count;
  decision.verdict = count >= cfg.gamma ? Verdict::kKeyframe : Verdict::kRejectedInsufficientMatches;
  return decision;
}

GateDecision Gate(const std::string& query_image_id, const DescriptorSet& query_descriptors,
                  const PosePredictor& predictor, const PoseDatabase& db, const GateConfig& cfg) {
  // Non-owning handle; the caller's set outlives this call.
  const std::shared_ptr<const DescriptorSet> handle(&query_descriptors, [](const DescriptorSet*) {});
  return Gate(query_image_id, [&handle] { return handle; }, predictor, db, cfg);
}

std::vector<BatchItem> GateBatch(std::span<const GateQuery> queries, const PosePredictor& predictor,
                                 const PoseDatabase& db, const GateConfig& cfg) {
  return RunBatch(queries, predictor, db, cfg, true);
}

namespace reference {

std::vector<BatchItem> GateBatch(std::span<const GateQuery> queries, const PosePredictor& predictor,
                                 const PoseDatabase& db, const GateConfig& cfg) {
  return RunBatch(queries, predictor, db, cfg, false);
}

}  // namespace reference

}  // namespace posegate
