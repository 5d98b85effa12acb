#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <iterator>

#include "oracles.hpp"
#include "posegate/descriptor_cache.hpp"
#include "posegate/descriptors.hpp"
#include "posegate/error.hpp"
#include "posegate/random.hpp"
#include "test_util.hpp"

using namespace posegate;

namespace {

DescriptorSet RandomReal(Rng& rng, std::size_t n, std::size_t dim, const std::string& id = "r") {
  std::vector<Keypoint> kps(n);
  for (auto& k : kps) k = {static_cast<float>(rng.Uniform(0, 379)), static_cast<float>(rng.Uniform(0, 379))};
  std::vector<float> data(n * dim);
  for (auto& v : data) v = static_cast<float>(rng.Uniform(-1, 1));
  return DescriptorSet::Real(id, kps, dim, data);
}

DescriptorSet RandomBinary(Rng& rng, std::size_t n, std::size_t bytes, const std::string& id = "b") {
  std::vector<Keypoint> kps(n);
  std::vector<std::uint8_t> data(n * bytes);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.NextU64());
  return DescriptorSet::Binary(id, kps, bytes, data);
}

std::vector<std::uint8_t> Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("empty query and tiny train sets give no matches") {
  Rng rng(1);
  const DescriptorSet train = RandomReal(rng, 10, 8);
  const DescriptorSet one = RandomReal(rng, 1, 8);
  const DescriptorSet empty = DescriptorSet::Real("e", {}, 8, {});
  CHECK(MatchFeatures(empty, train).good_match_count == 0);
  CHECK(MatchFeatures(train, empty).good_match_count == 0);
  // a single train row has no second neighbour, so the ratio test cannot pass
  CHECK(MatchFeatures(one, one).good_match_count == 0);
  CHECK(MatchFeatures(train, one).good_match_count == 0);
}

TEST_CASE("duplicates among distractors are all matched") {
  Rng rng(2);
  const std::size_t dim = 64;
  const DescriptorSet base = RandomReal(rng, 100, dim);
  // query: first 50 rows of base with a little noise, then 50 unrelated rows
  std::vector<float> q(base.real_data().begin(), base.real_data().begin() + 50 * dim);
  for (auto& v : q) v += static_cast<float>(rng.Uniform(-0.01, 0.01));
  const DescriptorSet other = RandomReal(rng, 50, dim);
  q.insert(q.end(), other.real_data().begin(), other.real_data().end());
  const DescriptorSet query = DescriptorSet::Real("q", std::vector<Keypoint>(100), dim, q);

  const MatchReport r = MatchFeatures(query, base);
  CHECK(r.good_match_count == oracle::MatchCount(query, base, 0.7));
  CHECK(r.good_match_count >= 50);
  for (const MatchPair& p : r.pairs) {
    if (p.query_idx < 50) CHECK(p.train_idx == p.query_idx);
  }
}

TEST_CASE("match counts agree with the double-loop oracle") {
  Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    const double ratio = rng.Uniform(0.3, 1.0);
    MatcherConfig cfg;
    cfg.ratio = ratio;
    if (t % 2 == 0) {
      const DescriptorSet a = RandomReal(rng, 1 + rng.Index(80), 1 + rng.Index(40));
      const DescriptorSet b = RandomReal(rng, 1 + rng.Index(80), a.dim());
      CHECK(MatchFeatures(a, b, cfg).good_match_count == oracle::MatchCount(a, b, ratio));
    } else {
      const DescriptorSet a = RandomBinary(rng, 1 + rng.Index(80), 1 + rng.Index(32));
      const DescriptorSet b = RandomBinary(rng, 1 + rng.Index(80), a.dim());
      CHECK(MatchFeatures(a, b, cfg).good_match_count == oracle::MatchCount(a, b, ratio));
    }
  }
}

TEST_CASE("lowering the ratio never adds matches") {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const DescriptorSet a = RandomReal(rng, 120, 16);
    const DescriptorSet b = RandomReal(rng, 120, 16);
    std::size_t prev = a.size();
    for (double ratio = 1.0; ratio > 0.05; ratio -= 0.05) {
      MatcherConfig cfg;
      cfg.ratio = ratio;
      const std::size_t n = MatchFeatures(a, b, cfg).good_match_count;
      CHECK(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("cross-check keeps a subset of ratio-test matches") {
  Rng rng(5);
  const DescriptorSet a = RandomBinary(rng, 200, 32);
  const DescriptorSet b = RandomBinary(rng, 150, 32);
  MatcherConfig loose;
  loose.ratio = 0.95;
  MatcherConfig cc = loose;
  cc.cross_check = true;
  const MatchReport plain = MatchFeatures(a, b, loose);
  const MatchReport checked = MatchFeatures(a, b, cc);
  CHECK(checked.good_match_count <= plain.good_match_count);
  for (const MatchPair& p : checked.pairs) {
    CHECK(std::find(plain.pairs.begin(), plain.pairs.end(), p) != plain.pairs.end());
  }
}

TEST_CASE("parallel matcher equals the serial reference") {
  Rng rng(6);
  for (int t = 0; t < 12; ++t) {
    MatcherConfig cfg;
    cfg.cross_check = t % 3 == 0;
    const std::size_t dim = t < 6 ? 128 : 1 + rng.Index(50);
    const DescriptorSet a = RandomReal(rng, 1 + rng.Index(301), dim);
    const DescriptorSet b = RandomReal(rng, 2 + rng.Index(301), dim);
    CHECK(MatchFeatures(a, b, cfg) == reference::MatchFeatures(a, b, cfg));
    const DescriptorSet c = RandomBinary(rng, 1 + rng.Index(200), 32);
    const DescriptorSet d = RandomBinary(rng, 2 + rng.Index(200), 32);
    CHECK(MatchFeatures(c, d, cfg) == reference::MatchFeatures(c, d, cfg));
  }
}

TEST_CASE("invalid matcher inputs") {
  Rng rng(7);
  const DescriptorSet r = RandomReal(rng, 4, 32);
  const DescriptorSet b = RandomBinary(rng, 4, 32);
  CHECK_THROWS_AS(MatchFeatures(r, b), Error);
  CHECK_THROWS_AS(MatchFeatures(r, RandomReal(rng, 4, 16)), Error);
  MatcherConfig bad;
  bad.ratio = 0.0;
  CHECK_THROWS_AS(MatchFeatures(r, r, bad), Error);
  bad.ratio = 1.5;
  CHECK_THROWS_AS(MatchFeatures(r, r, bad), Error);
  CHECK_THROWS_AS(DescriptorSet::Real("x", {{400.0f, 1.0f}}, 1, {0.0f}), Error);
  CHECK_THROWS_AS(DescriptorSet::Real("x", {{1.0f, 1.0f}}, 2, {0.0f}), Error);
}

TEST_CASE("descriptor caches round trip") {
  TempDir dir;
  Rng rng(8);
  const DescriptorSet r = RandomReal(rng, 77, 128, "seq-01/frame-000003");
  const DescriptorSet b = RandomBinary(rng, 33, 32, "seq-01/frame-000004");
  const DescriptorSet e = DescriptorSet::Binary("empty", {}, 32, {});
  for (const DescriptorSet* s : {&r, &b, &e}) {
    const auto path = dir / DescriptorCacheFileName(s->image_id());
    WriteDescriptorCache(path, *s);
    CHECK(ReadDescriptorCache(path, s->image_id()) == *s);
    CHECK(DecodeDescriptorCache(EncodeDescriptorCache(*s), s->image_id()) == *s);
  }
  CHECK(DescriptorCacheFileName("seq-01/frame-000003") == "seq-01_frame-000003.pgdc");
}

TEST_CASE("golden descriptor cache fixtures") {
  const std::string dir = POSEGATE_TEST_DATA;
  const auto real_bytes = Slurp(dir + "/golden_real.pgdc");
  const DescriptorSet real = DescriptorSet::Real("g", {{1.5f, 2.25f}, {379.0f, 0.0f}}, 3,
                                                 {0.5f, -1.0f, 3.0f, 1e-3f, 2.0f, -0.25f});
  CHECK(real_bytes.size() == 55);
  CHECK(EncodeDescriptorCache(real) == real_bytes);
  CHECK(DecodeDescriptorCache(real_bytes, "g") == real);

  const auto bin_bytes = Slurp(dir + "/golden_binary.pgdc");
  const DescriptorSet bin = DescriptorSet::Binary(
      "g", {{10.0f, 20.0f}, {30.5f, 40.75f}, {0.0f, 0.0f}}, 4,
      {0x00, 0xFF, 0x0F, 0xA5, 0x01, 0x02, 0x04, 0x08, 0x80, 0x40, 0x20, 0x10});
  CHECK(bin_bytes.size() == 51);
  CHECK(EncodeDescriptorCache(bin) == bin_bytes);
  CHECK(DecodeDescriptorCache(bin_bytes, "g") == bin);
}

TEST_CASE("corrupt caches are rejected") {
  Rng rng(9);
  const auto good = EncodeDescriptorCache(RandomBinary(rng, 5, 32));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(DecodeDescriptorCache(bad_magic, "x"), Error);
  auto bad_version = good;
  bad_version[4] = 2;
  CHECK_THROWS_AS(DecodeDescriptorCache(bad_version, "x"), Error);
  auto bad_kind = good;
  bad_kind[6] = 7;
  CHECK_THROWS_AS(DecodeDescriptorCache(bad_kind, "x"), Error);
  auto truncated = good;
  truncated.pop_back();
  CHECK_THROWS_AS(DecodeDescriptorCache(truncated, "x"), Error);
  auto extra = good;
  extra.push_back(0);
  CHECK_THROWS_AS(DecodeDescriptorCache(extra, "x"), Error);
  try {
    (void)ReadDescriptorCache("/nonexistent/x.pgdc", "x");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingDescriptors);
  }
}
