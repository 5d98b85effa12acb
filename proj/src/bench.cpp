#include "posegate/bench.hpp"

#include <chrono>
#include <vector>

#include "posegate/descriptors.hpp"
#include "posegate/error.hpp"
#include "posegate/pose_db.hpp"
#include "posegate/random.hpp"

namespace posegate {

namespace {

using Clock = std::chrono::steady_clock;

double Micros(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

DescriptorSet RandomRealSet(Rng& rng, std::size_t n, std::size_t dim, const std::string& id) {
  std::vector<Keypoint> kps(n);
  for (Keypoint& kp : kps) {
    kp = {static_cast<float>(rng.Uniform(0, 379)), static_cast<float>(rng.Uniform(0, 379))};
  }
  std::vector<float> data(n * dim);
  for (float& v : data) v = static_cast<float>(rng.Uniform());
  return DescriptorSet::Real(id, std::move(kps), dim, std::move(data));
}

}  // namespace

BenchReport RunBench(const BenchConfig& cfg) {
  if (cfg.db_size < 1 || cfg.n_descriptors < 1 || cfg.repetitions < 1 || cfg.dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bench sizes must be at least 1");
  }
  Rng rng(cfg.seed);
  const Eigen::Vector3d lo(0, 0, 0);
  const Eigen::Vector3d hi(100, 40, 10);
  PoseDatabase db("bench");
  for (std::size_t i = 0; i < cfg.db_size; ++i) {
    db.Add({"img" + std::to_string(i), PoseFromRotation(rng.InBox(lo, hi), rng.UniformRotation()), nullptr});
  }
  const DescriptorSet query = RandomRealSet(rng, cfg.n_descriptors, cfg.dim, "query");
  const DescriptorSet train = RandomRealSet(rng, cfg.n_descriptors, cfg.dim, "train");

  std::vector<Pose> predictions;
  predictions.reserve(cfg.repetitions);
  for (std::size_t r = 0; r < cfg.repetitions; ++r) {
    const Pose& anchor = db.entry(rng.Index(db.size())).pose;
    const Eigen::Vector3d offset = rng.UnitVector() * (0.5 * cfg.d_th * rng.Uniform());
    predictions.push_back(PoseFromRotation(anchor.position() + offset, rng.UniformRotation()));
  }

  auto match = [&] {
    return cfg.parallel_match ? MatchFeatures(query, train) : reference::MatchFeatures(query, train);
  };
  // Warm-up outside the measurement.
  volatile std::size_t sink = match().good_match_count;

  std::vector<double> retrieve_us, match_us, combined_us;
  for (const Pose& p : predictions) {
    const auto t0 = Clock::now();
    const RetrievalResult found = RetrieveImage(db, p, cfg.d_th);
    const auto t1 = Clock::now();
    const MatchReport report = match();
    const auto t2 = Clock::now();
    sink = sink + report.good_match_count + (found ? 1 : 0);
    retrieve_us.push_back(Micros(t0, t1));
    match_us.push_back(Micros(t1, t2));
    combined_us.push_back(Micros(t0, t2));
  }
  (void)sink;

  BenchReport out;
  out.config = cfg;
  out.retrieve = SummarizeLatency(std::move(retrieve_us));
  out.match = SummarizeLatency(std::move(match_us));
  out.combined = SummarizeLatency(std::move(combined_us));
  return out;
}

}  // namespace posegate
