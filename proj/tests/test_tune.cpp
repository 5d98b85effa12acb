#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "posegate/error.hpp"
#include "posegate/gate.hpp"
#include "posegate/json_io.hpp"
#include "posegate/predictors.hpp"
#include "posegate/tune.hpp"
#include "scenes.hpp"

using namespace posegate;

namespace {

PoseDatabase DbFrom(const std::vector<oracle::Arr7>& poses) {
  PoseDatabase db("t");
  for (std::size_t i = 0; i < poses.size(); ++i) {
    db.Add({"e" + std::to_string(i), Pose::FromArray(poses[i]), nullptr}, false);
  }
  return db;
}

}  // namespace

TEST_CASE("far pair agrees with brute force") {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::vector<oracle::Arr7> poses;
    const std::size_t n = 2 + rng.Index(40);
    for (std::size_t i = 0; i < n; ++i) poses.push_back(oracle::RandomPose(rng, 4.0));
    for (std::size_t i = 0; i < n / 3; ++i) {
      auto p = poses[rng.Index(n)];
      p[1] += rng.Uniform(-3.0, 3.0);
      poses.push_back(p);
    }
    const PoseDatabase db = DbFrom(poses);
    const double d_th = rng.Uniform(0.5, 6.0);
    for (std::size_t a = 0; a < poses.size(); ++a) {
      const auto got = SampleFarPair(db, a, d_th);
      const auto want = oracle::FarPair(poses, a, d_th);
      REQUIRE(got.has_value() == want.has_value());
      if (got) {
        CHECK(got->far_index == *want);
        CHECK(got->position_distance > d_th);
      }
    }
  }
}

TEST_CASE("an anchor with nothing beyond d_th has no far pair") {
  const PoseDatabase db = DbFrom({{0, 0, 0, 1, 0, 0, 0}, {1, 0, 0, 1, 0, 0, 0}});
  CHECK_FALSE(SampleFarPair(db, 0, 1.0).has_value());  // exactly d_th is not far
  CHECK(SampleFarPair(db, 0, 0.999).has_value());
  // zero orientation distance still counts
  CHECK(SampleFarPair(db, 0, 0.5)->far_index == 1);
}

TEST_CASE("clustered scene: far pairs share 7 landmarks so gamma is 7") {
  const double d_th = 1.5;
  const scenes::ClusteredDb s = scenes::MakeClusteredDb(3, 7, d_th);
  std::vector<std::string> anchors;
  for (const TrainEntry& e : s.db.entries()) anchors.push_back(e.image_id);
  const TuneReport report = TuneGamma(s.db, anchors, d_th);
  CHECK(report.pairs.size() == anchors.size());
  CHECK(report.max_matches == 7);
  CHECK(report.suggested_gamma == 7);

  // gate each anchor's descriptors at its far partner's pose
  std::vector<PoseRecord> preds;
  for (const FarPair& p : report.pairs) {
    CHECK(p.good_match_count == 7);
    preds.push_back({p.anchor_id, s.db.entry(p.far_index).pose, 0});
  }
  const FilePosePredictor predictor(preds);
  GateConfig cfg;
  cfg.d_th = d_th;
  for (const FarPair& p : report.pairs) {
    const DescriptorSet& q = s.db.DescriptorsOf(p.anchor_index);
    cfg.gamma = 8;
    const GateDecision d = Gate(p.anchor_id, q, predictor, s.db, cfg);
    CHECK(d.retrieved_index == std::optional<std::size_t>(p.far_index));
    CHECK(d.verdict == Verdict::kRejectedInsufficientMatches);
    cfg.gamma = 7;
    CHECK(Gate(p.anchor_id, q, predictor, s.db, cfg).is_keyframe());
  }
}

TEST_CASE("parallel tuner equals the serial reference and survives JSON") {
  const scenes::ClusteredDb s = scenes::MakeClusteredDb(4, 3, 1.0, 8, 4);
  std::vector<std::string> anchors;
  for (std::size_t i = 0; i < s.db.size(); i += 2) anchors.push_back(s.db.entry(i).image_id);
  const TuneReport a = TuneGamma(s.db, anchors, 1.0);
  const TuneReport b = reference::TuneGamma(s.db, anchors, 1.0);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].anchor_id == b.pairs[i].anchor_id);
    CHECK(a.pairs[i].far_id == b.pairs[i].far_id);
    CHECK(a.pairs[i].good_match_count == b.pairs[i].good_match_count);
  }
  CHECK(a.suggested_gamma == 3);
  const TuneReport back = TuneReportFromJson(ToJson(a));
  CHECK(back.suggested_gamma == a.suggested_gamma);
  CHECK(back.pairs.size() == a.pairs.size());
  CHECK(back.pairs.front().position_distance == a.pairs.front().position_distance);
  const auto j = ToJson(a);
  for (const char* key : {"scene", "d_th", "ratio", "pairs", "max_matches", "suggested_gamma"}) {
    CHECK(j.contains(key));
  }
  for (const char* key : {"anchor", "far", "dist_pos", "dist_ori", "matches"}) {
    CHECK(j["pairs"][0].contains(key));
  }
}

TEST_CASE("tuner input errors and the gamma floor") {
  const PoseDatabase db = DbFrom({{0, 0, 0, 1, 0, 0, 0}, {0.1, 0, 0, 1, 0, 0, 0}});
  const std::vector<std::string> unknown{"nope"};
  CHECK_THROWS_AS(TuneGamma(db, unknown, 1.0), Error);
  const std::vector<std::string> anchors{"e0"};
  const TuneReport r = TuneGamma(db, anchors, 1.0);
  CHECK(r.pairs.empty());
  CHECK(r.max_matches == 0);
  CHECK(r.suggested_gamma == 1);
}
