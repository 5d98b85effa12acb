// posegate: pose-only retrieval and match-count gating for absolute pose
// regressors. Reports go to stdout (or --out) as JSON, tables to stderr.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "posegate/bench.hpp"
#include "posegate/db_manifest.hpp"
#include "posegate/descriptor_cache.hpp"
#include "posegate/detector.hpp"
#include "posegate/error.hpp"
#include "posegate/eval.hpp"
#include "posegate/gate.hpp"
#include "posegate/image.hpp"
#include "posegate/json_io.hpp"
#include "posegate/pose_file.hpp"
#include "posegate/predictors.hpp"
#include "posegate/presets.hpp"
#include "posegate/synth.hpp"
#include "posegate/tune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace posegate;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitMissingData = 3;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingDescriptors:
    case ErrorCode::kMissingGroundTruth:
    case ErrorCode::kPredictionFailure:
    case ErrorCode::kIo:
      return kExitMissingData;
    default:
      return kExitConfig;
  }
}

void Emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    WriteJsonFile(out, j);
  }
}

struct Thresholds {
  double d_th = 0.0;
  int gamma = 0;
  double ratio = 0.7;
  std::string preset;
  bool sign_invariant = false;
  CLI::Option* d_th_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* ratio_opt = nullptr;

  void Register(CLI::App* cmd, bool with_gamma) {
    d_th_opt = cmd->add_option("--dth", d_th, "position threshold in meters");
    if (with_gamma) gamma_opt = cmd->add_option("--gamma", gamma, "minimum good matches");
    ratio_opt = cmd->add_option("--ratio", ratio, "Lowe ratio (default 0.7)");
    cmd->add_option("--preset", preset, "scene[/model] preset, e.g. chess or hospital/ms-t");
    cmd->add_flag("--sign-invariant", sign_invariant, "treat q and -q as the same orientation");
  }

  // Fills unset values from the preset, then checks required ones.
  void Resolve(bool with_gamma) {
    if (!preset.empty()) {
      const auto p = FindPreset(preset);
      if (!p) throw Error(ErrorCode::kInvalidArgument, "unknown preset " + preset);
      if (d_th_opt->count() == 0) d_th = p->d_th;
      if (with_gamma && gamma_opt->count() == 0) gamma = static_cast<int>(p->gamma);
      if (ratio_opt->count() == 0) ratio = p->ratio;
    } else {
      if (d_th_opt->count() == 0) throw Error(ErrorCode::kInvalidArgument, "--dth is required");
      if (with_gamma && gamma_opt->count() == 0) {
        throw Error(ErrorCode::kInvalidArgument, "--gamma is required");
      }
    }
    if (with_gamma && gamma < 1) throw Error(ErrorCode::kInvalidArgument, "--gamma must be >= 1");
  }

  GateConfig ToGateConfig() const {
    GateConfig cfg;
    cfg.d_th = d_th;
    cfg.gamma = static_cast<std::size_t>(gamma);
    cfg.matcher.ratio = ratio;
    cfg.distance.sign_invariant_orientation = sign_invariant;
    return cfg;
  }
};

AxisAlignedBox BoundsOf(const PoseDatabase& db, const std::vector<PoseRecord>& extra) {
  AxisAlignedBox box;
  box.min = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  box.max = -box.min;
  for (const TrainEntry& e : db.entries()) {
    box.min = box.min.cwiseMin(e.pose.position());
    box.max = box.max.cwiseMax(e.pose.position());
  }
  for (const PoseRecord& r : extra) {
    box.min = box.min.cwiseMin(r.pose.position());
    box.max = box.max.cwiseMax(r.pose.position());
  }
  if (!box.min.allFinite()) box = {};
  return box;
}

// --pred is either a prediction file or synthetic:sigma_pos,sigma_rot,p_out,seed[,offset].
std::unique_ptr<PosePredictor> MakePredictor(const std::string& pred, const PoseDatabase& db,
                                             const std::vector<PoseRecord>& truth, double d_th) {
  const std::optional<SyntheticSpec> spec = ParseSyntheticSpec(pred);
  if (!spec) return std::make_unique<FilePosePredictor>(FilePosePredictor::FromFile(pred));
  if (truth.empty()) {
    throw Error(ErrorCode::kMissingGroundTruth, "synthetic predictor needs query ground truth");
  }
  SyntheticPredictorConfig cfg;
  cfg.sigma_pos_m = spec->sigma_pos_m;
  cfg.sigma_rot_deg = spec->sigma_rot_deg;
  cfg.p_out = spec->p_out;
  cfg.seed = spec->seed;
  cfg.outlier_offset_m = spec->outlier_offset_m;
  cfg.scene_box = BoundsOf(db, truth);
  if (!db.empty()) {
    AxisAlignedBox region = BoundsOf(db, {});
    region.min.array() -= d_th;
    region.max.array() += d_th;
    cfg.training_region = region;
  }
  return std::make_unique<SyntheticPosePredictor>(truth, cfg);
}

fs::path QueryDescriptorDir(const std::string& explicit_dir, const std::string& db_path) {
  if (!explicit_dir.empty()) return explicit_dir;
  const auto dir = ManifestDescriptorDir(db_path);
  if (!dir) {
    throw Error(ErrorCode::kMissingDescriptors,
                "database has no descriptor directory; pass --query-descriptors");
  }
  return *dir;
}

QueryDescriptorSource CacheSource(const fs::path& dir, const std::string& id) {
  return [dir, id] {
    return std::make_shared<const DescriptorSet>(
        ReadDescriptorCache(dir / DescriptorCacheFileName(id), id));
  };
}

std::vector<std::string> ReadIdList(const std::string& path) {
  std::vector<std::string> ids;
  std::istringstream in(ReadTextFile(path));
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::string id;
    if (!(tokens >> id) || id.front() == '#') continue;
    ids.push_back(id);
  }
  return ids;
}

std::string Fmt(std::optional<double> v, const char* spec = "%.3f") {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, *v);
  return buf;
}

void PrintEvalTable(const EvalReport& r) {
  std::cerr << (r.gated ? "gated  " : "ungated") << "  n=" << r.n_total
            << " keyframes=" << r.n_keyframes << " (" << Fmt(100.0 * r.keyframe_ratio, "%.1f")
            << "%)  median " << Fmt(r.median_pos_m) << " m / " << Fmt(r.median_ori_deg, "%.2f")
            << " deg  high/med/low " << Fmt(r.pct_high, "%.1f") << "/" << Fmt(r.pct_medium, "%.1f")
            << "/" << Fmt(r.pct_low, "%.1f") << '\n';
}

// --- subcommands -----------------------------------------------------------

struct BuildDbArgs {
  std::string poses, descriptors, out, scene;
};

int RunBuildDb(const BuildDbArgs& a) {
  std::optional<fs::path> dir;
  if (!a.descriptors.empty()) dir = a.descriptors;
  const BuildDbSummary s = BuildDatabaseFile(a.poses, dir, a.out, a.scene);
  std::cerr << "database " << a.out << ": " << s.entries << " entries, " << s.with_descriptors
            << " with descriptors\n";
  std::cout << json{{"out", a.out}, {"entries", s.entries}, {"with_descriptors", s.with_descriptors}}.dump()
            << '\n';
  return 0;
}

struct TuneArgs {
  std::string db, anchors, out;
  Thresholds th;
};

int RunTune(TuneArgs& a) {
  a.th.Resolve(false);
  const PoseDatabase db = LoadDatabaseFile(a.db);
  const std::vector<std::string> anchors = ReadIdList(a.anchors);
  MatcherConfig matcher;
  matcher.ratio = a.th.ratio;
  DistanceConfig dist;
  dist.sign_invariant_orientation = a.th.sign_invariant;
  const TuneReport report = TuneGamma(db, anchors, a.th.d_th, matcher, dist);

  std::map<std::size_t, std::size_t> histogram;
  for (const FarPair& p : report.pairs) ++histogram[p.good_match_count];
  std::cerr << "far pairs: " << report.pairs.size() << " of " << anchors.size() << " anchors\n"
            << "matches  count\n";
  for (const auto& [matches, count] : histogram) {
    std::fprintf(stderr, "%7zu  %5zu\n", matches, count);
  }
  std::cerr << "max matches " << report.max_matches << ", suggested gamma "
            << report.suggested_gamma << '\n';
  Emit(ToJson(report), a.out);
  return 0;
}

struct GateArgs {
  std::string db, query, pred, truth, query_descriptors;
  Thresholds th;
};

int RunGate(GateArgs& a) {
  a.th.Resolve(true);
  const PoseDatabase db = LoadDatabaseFile(a.db);
  std::vector<PoseRecord> truth;
  if (!a.truth.empty()) truth = ReadPoseFile(a.truth);
  const auto predictor = MakePredictor(a.pred, db, truth, a.th.d_th);
  const fs::path dir = QueryDescriptorDir(a.query_descriptors, a.db);
  const GateDecision d = Gate(a.query, CacheSource(dir, a.query), *predictor, db, a.th.ToGateConfig());
  std::cerr << a.query << ": " << VerdictName(d.verdict);
  if (d.retrieved_image_id) std::cerr << " (retrieved " << *d.retrieved_image_id << ")";
  if (d.good_match_count) std::cerr << ", " << *d.good_match_count << " good matches";
  std::cerr << '\n';
  std::cout << ToJson(d).dump() << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string db, queries, pred, out, decisions, query_descriptors;
  bool ungated_baseline = false;
  Thresholds th;
};

int RunEvaluate(EvaluateArgs& a) {
  a.th.Resolve(true);
  const PoseDatabase db = LoadDatabaseFile(a.db);
  const std::vector<PoseRecord> truth = ReadPoseFile(a.queries);
  const auto predictor = MakePredictor(a.pred, db, truth, a.th.d_th);
  const fs::path dir = QueryDescriptorDir(a.query_descriptors, a.db);

  std::vector<GateQuery> queries;
  GroundTruth gt;
  for (const PoseRecord& r : truth) {
    queries.push_back({r.image_id, CacheSource(dir, r.image_id)});
    gt.insert_or_assign(r.image_id, r.pose);
  }
  const std::vector<BatchItem> items = GateBatch(queries, *predictor, db, a.th.ToGateConfig());

  std::vector<GateDecision> decisions;
  json errors = json::array();
  std::optional<std::ofstream> log;
  if (!a.decisions.empty()) log.emplace(a.decisions, std::ios::trunc);
  for (const BatchItem& item : items) {
    if (item.decision) {
      decisions.push_back(*item.decision);
      if (log) *log << ToJson(*item.decision).dump() << '\n';
    } else {
      errors.push_back({{"image_id", item.image_id},
                        {"error", std::string(ErrorCodeName(item.error->code()))},
                        {"message", item.error->what()}});
      std::cerr << "error: " << item.image_id << ": " << item.error->what() << '\n';
    }
  }

  const EvalReport gated = Evaluate(decisions, gt, AccuracyTiers{}, true, db.scene_name());
  json report = {{"config", {{"d_th", a.th.d_th}, {"gamma", a.th.gamma}, {"ratio", a.th.ratio}}},
                 {"gated", ToJson(gated)},
                 {"errors", errors}};
  PrintEvalTable(gated);
  if (a.ungated_baseline) {
    const EvalReport ungated = Evaluate(decisions, gt, AccuracyTiers{}, false, db.scene_name());
    const RunComparison cmp = CompareRuns(ungated, gated);
    report["ungated"] = ToJson(ungated);
    report["comparison"] = ToJson(cmp);
    PrintEvalTable(ungated);
    for (const MetricDelta& m : cmp.rows) {
      std::fprintf(stderr, "  %-15s ungated %9s  gated %9s  delta %9s  improvement %7s%%\n",
                   m.metric.c_str(), Fmt(m.ungated).c_str(), Fmt(m.gated).c_str(),
                   Fmt(m.delta).c_str(), Fmt(m.improvement_pct, "%.1f").c_str());
    }
  }
  Emit(report, a.out);
  return errors.empty() ? 0 : kExitMissingData;
}

struct SynthArgs {
  std::uint64_t seed = 42;
  std::size_t landmarks = 2000, train = 400, test = 200, sequences = 4;
  double bias = 0.0, fov = 30.0, max_dist = 8.0;
  std::string out;
};

int RunSynth(const SynthArgs& a) {
  SceneConfig scene_cfg;
  scene_cfg.seed = a.seed;
  scene_cfg.n_landmarks = a.landmarks;
  scene_cfg.fov_half_angle_deg = a.fov;
  scene_cfg.max_view_distance_m = a.max_dist;
  const SyntheticScene scene = GenerateScene(scene_cfg);
  SplitConfig split_cfg;
  split_cfg.seed = a.seed;
  split_cfg.n_train = a.train;
  split_cfg.n_test = a.test;
  split_cfg.coverage_bias = a.bias;
  split_cfg.n_sequences = a.sequences;
  const SyntheticSplit split = GenerateSplit(scene, split_cfg);
  WriteSyntheticDataset(split, a.out);
  std::cerr << "wrote " << split.train_frames.size() << " training and " << split.test_frames.size()
            << " query frames to " << a.out << '\n';
  std::cout << json{{"out", a.out},
                    {"train", split.train_frames.size()},
                    {"test", split.test_frames.size()},
                    {"landmarks", scene.landmarks.size()}}
                   .dump()
            << '\n';
  return 0;
}

struct BenchArgs {
  BenchConfig cfg;
  bool serial = false;
  std::string out;
};

int RunBenchCmd(BenchArgs& a) {
  a.cfg.parallel_match = !a.serial;
  const BenchReport r = RunBench(a.cfg);
  std::fprintf(stderr, "%-10s %10s %10s %10s  (us)\n", "stage", "p50", "p95", "max");
  for (const auto& [name, p] : {std::pair{"retrieve", r.retrieve}, std::pair{"match", r.match},
                                std::pair{"combined", r.combined}}) {
    std::fprintf(stderr, "%-10s %10.1f %10.1f %10.1f\n", name, p.p50, p.p95, p.max);
  }
  Emit(ToJson(r), a.out);
  return 0;
}

struct ExtractArgs {
  std::string image, id, out;
};

int RunExtract(const ExtractArgs& a) {
  const Image pre = PreprocessImage(ReadPnm(a.image));
  const DescriptorSet set = ExtractFeatures(pre, CornerBinaryDetector{}, a.id);
  fs::create_directories(a.out);
  const fs::path path = fs::path(a.out) / DescriptorCacheFileName(a.id);
  WriteDescriptorCache(path, set);
  std::cerr << a.id << ": " << set.size() << " keypoints -> " << path.string() << '\n';
  std::cout << json{{"image_id", a.id}, {"keypoints", set.size()}, {"path", path.string()}}.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posegate: keyframe gating for absolute pose regressors"};
  app.require_subcommand(1);

  BuildDbArgs build;
  auto* build_cmd = app.add_subcommand("build-db", "ingest a pose file into a database manifest");
  build_cmd->add_option("--poses", build.poses, "pose file")->required();
  build_cmd->add_option("--descriptors", build.descriptors, "directory of .pgdc caches");
  build_cmd->add_option("--out", build.out, "manifest to write")->required();
  build_cmd->add_option("--scene", build.scene, "scene name (default: pose file stem)");

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune-gamma", "suggest gamma from far training pairs");
  tune_cmd->add_option("--db", tune.db)->required();
  tune_cmd->add_option("--anchors", tune.anchors, "file of anchor image ids")->required();
  tune_cmd->add_option("--out", tune.out, "report path (default stdout)");
  tune.th.Register(tune_cmd, false);

  GateArgs gate;
  auto* gate_cmd = app.add_subcommand("gate", "decide whether one query is a keyframe");
  gate_cmd->add_option("--db", gate.db)->required();
  gate_cmd->add_option("--query", gate.query, "query image id")->required();
  gate_cmd->add_option("--pred", gate.pred, "prediction file or synthetic:...")->required();
  gate_cmd->add_option("--truth", gate.truth, "query ground truth (synthetic predictor)");
  gate_cmd->add_option("--query-descriptors", gate.query_descriptors, "query cache directory");
  gate.th.Register(gate_cmd, true);

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "gate every query and report accuracy");
  eval_cmd->add_option("--db", eval.db)->required();
  eval_cmd->add_option("--queries", eval.queries, "query ground-truth pose file")->required();
  eval_cmd->add_option("--pred", eval.pred, "prediction file or synthetic:...")->required();
  eval_cmd->add_option("--out", eval.out, "report path (default stdout)");
  eval_cmd->add_option("--decisions", eval.decisions, "write the JSON-lines decision log here");
  eval_cmd->add_option("--query-descriptors", eval.query_descriptors, "query cache directory");
  eval_cmd->add_flag("--ungated-baseline", eval.ungated_baseline, "also report the ungated run");
  eval.th.Register(eval_cmd, true);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  synth_cmd->add_option("--seed", synth.seed)->required();
  synth_cmd->add_option("--landmarks", synth.landmarks)->required();
  synth_cmd->add_option("--train", synth.train)->required();
  synth_cmd->add_option("--test", synth.test)->required();
  synth_cmd->add_option("--bias", synth.bias, "fraction of queries outside training coverage")->required();
  synth_cmd->add_option("--out", synth.out)->required();
  synth_cmd->add_option("--sequences", synth.sequences);
  synth_cmd->add_option("--fov", synth.fov, "half-angle in degrees");
  synth_cmd->add_option("--max-dist", synth.max_dist, "view distance in meters");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "measure retrieval and matching latency");
  bench_cmd->add_option("--db-size", bench.cfg.db_size)->required();
  bench_cmd->add_option("--descriptors", bench.cfg.n_descriptors)->required();
  bench_cmd->add_option("--reps", bench.cfg.repetitions)->required();
  bench_cmd->add_option("--dim", bench.cfg.dim, "descriptor length (default 128)");
  bench_cmd->add_option("--seed", bench.cfg.seed);
  bench_cmd->add_flag("--serial", bench.serial, "use the single-threaded matcher");
  bench_cmd->add_option("--out", bench.out, "report path (default stdout)");

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "run the built-in detector on a PGM/PPM image");
  extract_cmd->add_option("--image", extract.image)->required();
  extract_cmd->add_option("--id", extract.id, "image id")->required();
  extract_cmd->add_option("--out", extract.out, "cache directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*build_cmd) return RunBuildDb(build);
    if (*tune_cmd) return RunTune(tune);
    if (*gate_cmd) return RunGate(gate);
    if (*eval_cmd) return RunEvaluate(eval);
    if (*synth_cmd) return RunSynth(synth);
    if (*bench_cmd) return RunBenchCmd(bench);
    if (*extract_cmd) return RunExtract(extract);
  } catch (const Error& e) {
    std::cerr << "posegate: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "posegate: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
