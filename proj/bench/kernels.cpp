// Serial reference vs OpenMP kernels: matching, batch gating and gamma tuning.
// Usage: bench_kernels [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef POSEGATE_HAVE_OPENMP
#include <omp.h>
#endif

#include "posegate/descriptors.hpp"
#include "posegate/eval.hpp"
#include "posegate/gate.hpp"
#include "posegate/pose_file.hpp"
#include "posegate/predictors.hpp"
#include "posegate/random.hpp"
#include "posegate/synth.hpp"
#include "posegate/tune.hpp"

using namespace posegate;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
LatencyPercentiles Time(std::size_t reps, F&& f) {
  std::vector<double> us;
  f();
  for (std::size_t i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    f();
    us.push_back(std::chrono::duration<double, std::micro>(Clock::now() - t0).count());
  }
  return SummarizeLatency(us);
}

void Row(const char* name, const LatencyPercentiles& serial, const LatencyPercentiles& parallel,
         bool same) {
  std::printf("%-12s %12.1f %12.1f %8.2fx  %s\n", name, serial.p50, parallel.p50,
              serial.p50 / parallel.p50, same ? "identical" : "MISMATCH");
}

DescriptorSet RandomReal(Rng& rng, std::size_t n, std::size_t dim, const std::string& id) {
  std::vector<Keypoint> kps(n);
  std::vector<float> data(n * dim);
  for (auto& k : kps) k = {static_cast<float>(rng.Uniform(0, 379)), static_cast<float>(rng.Uniform(0, 379))};
  for (auto& v : data) v = static_cast<float>(rng.Uniform());
  return DescriptorSet::Real(id, std::move(kps), dim, std::move(data));
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t reps = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20;
#ifdef POSEGATE_HAVE_OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#endif
  std::printf("%-12s %12s %12s %9s\n", "kernel", "serial us", "openmp us", "speedup");
  bool ok = true;

  Rng rng(11);
  const DescriptorSet q = RandomReal(rng, 500, 128, "q");
  const DescriptorSet t = RandomReal(rng, 500, 128, "t");
  {
    const bool same = MatchFeatures(q, t) == reference::MatchFeatures(q, t);
    ok &= same;
    Row("match", Time(reps, [&] { (void)reference::MatchFeatures(q, t); }),
        Time(reps, [&] { (void)MatchFeatures(q, t); }), same);
  }

  SceneConfig scene_cfg;
  scene_cfg.n_landmarks = 800;
  const SyntheticScene scene = GenerateScene(scene_cfg);
  SplitConfig split_cfg;
  split_cfg.n_train = 300;
  split_cfg.n_test = 150;
  split_cfg.coverage_bias = 0.3;
  const SyntheticSplit split = GenerateSplit(scene, split_cfg);

  std::vector<PoseRecord> truth;
  std::vector<GateQuery> queries;
  for (const SyntheticFrame& f : split.test_frames) {
    truth.push_back({f.image_id, f.true_pose, 0});
    auto set = std::make_shared<const DescriptorSet>(f.descriptor_set);
    queries.push_back({f.image_id, [set] { return set; }});
  }
  SyntheticPredictorConfig pcfg;
  pcfg.p_out = 0.2;
  pcfg.seed = 3;
  pcfg.scene_box = scene_cfg.box;
  const SyntheticPosePredictor predictor(truth, pcfg);
  GateConfig gcfg;
  gcfg.gamma = 10;
  {
    const auto a = GateBatch(queries, predictor, split.db, gcfg);
    const auto b = reference::GateBatch(queries, predictor, split.db, gcfg);
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = a[i].decision && b[i].decision && a[i].decision->SameOutcome(*b[i].decision);
    }
    ok &= same;
    Row("gate-batch", Time(reps, [&] { (void)reference::GateBatch(queries, predictor, split.db, gcfg); }),
        Time(reps, [&] { (void)GateBatch(queries, predictor, split.db, gcfg); }), same);
  }
  {
    const std::vector<std::string>& anchors = split.sequences.front();
    const TuneReport a = TuneGamma(split.db, anchors, 1.5);
    const TuneReport b = reference::TuneGamma(split.db, anchors, 1.5);
    bool same = a.pairs.size() == b.pairs.size() && a.suggested_gamma == b.suggested_gamma;
    for (std::size_t i = 0; same && i < a.pairs.size(); ++i) {
      same = a.pairs[i].far_index == b.pairs[i].far_index &&
             a.pairs[i].good_match_count == b.pairs[i].good_match_count;
    }
    ok &= same;
    Row("tune-gamma", Time(reps, [&] { (void)reference::TuneGamma(split.db, anchors, 1.5); }),
        Time(reps, [&] { (void)TuneGamma(split.db, anchors, 1.5); }), same);
  }
  return ok ? 0 : 1;
}
