#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "posegate/descriptor_cache.hpp"
#include "posegate/detector.hpp"
#include "posegate/error.hpp"
#include "posegate/image.hpp"
#include "posegate/random.hpp"
#include "test_util.hpp"

using namespace posegate;

namespace {

// Resampler written from the textbook formula: source coordinate
// (d + 0.5) * src / dst - 0.5, clamped to the image, interpolating columns
// first.
double SampleOracle(const Image& img, double sx, double sy, int c) {
  sx = std::min(std::max(sx, 0.0), img.width - 1.0);
  sy = std::min(std::max(sy, 0.0), img.height - 1.0);
  const int x0 = static_cast<int>(sx);
  const int y0 = static_cast<int>(sy);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const double left = img.at(x0, y0, c) * (1 - fy) + img.at(x0, y1, c) * fy;
  const double right = img.at(x1, y0, c) * (1 - fy) + img.at(x1, y1, c) * fy;
  return left * (1 - fx) + right * fx;
}

Image Checkerboard(int size, int cell) {
  Image img(size, size, 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) img.at(x, y) = ((x / cell + y / cell) % 2) ? 230 : 25;
  }
  return img;
}

Image Noise(int w, int h, int c, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h, c);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.Index(256));
  return img;
}

}  // namespace

TEST_CASE("preprocessing produces a 380x380 grey image") {
  const Image out = PreprocessImage(Noise(640, 480, 3, 1));
  CHECK(out.width == 380);
  CHECK(out.height == 380);
  CHECK(out.channels == 1);
}

TEST_CASE("constant images stay constant") {
  for (int v : {0, 17, 128, 255}) {
    const Image out = PreprocessImage(Image(640, 480, 3, static_cast<std::uint8_t>(v)));
    CHECK(std::all_of(out.pixels.begin(), out.pixels.end(), [v](std::uint8_t p) { return p == v; }));
  }
}

TEST_CASE("resize matches an independent bilinear resampler within one level") {
  const Image src = Noise(640, 480, 3, 2);
  const Image out = ResizeBilinear(src, 384, 384);
  int worst = 0;
  for (int y = 0; y < 384; ++y) {
    for (int x = 0; x < 384; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double want = SampleOracle(src, (x + 0.5) * 640.0 / 384 - 0.5, (y + 0.5) * 480.0 / 384 - 0.5, c);
        worst = std::max(worst, static_cast<int>(std::abs(out.at(x, y, c) - std::lround(want))));
      }
    }
  }
  CHECK(worst <= 1);
}

TEST_CASE("center crop takes the middle") {
  Image img(384, 384, 1);
  for (int y = 0; y < 384; ++y) {
    for (int x = 0; x < 384; ++x) img.at(x, y) = static_cast<std::uint8_t>((x * 7 + y * 13) & 255);
  }
  const Image crop = CenterCrop(img, 380, 380);
  CHECK(crop.at(0, 0) == img.at(2, 2));
  CHECK(crop.at(379, 379) == img.at(381, 381));
  CHECK(crop.at(100, 37) == img.at(102, 39));
  CHECK_THROWS_AS(CenterCrop(img, 400, 10), Error);
}

TEST_CASE("grey conversion uses luma weights") {
  Image img(3, 1, 3);
  const std::uint8_t px[9] = {255, 0, 0, 0, 255, 0, 0, 0, 255};
  std::copy(px, px + 9, img.pixels.begin());
  const Image g = ToGray(img);
  CHECK(g.at(0, 0) == 76);   // 0.299 * 255
  CHECK(g.at(1, 0) == 150);  // 0.587 * 255
  CHECK(g.at(2, 0) == 29);   // 0.114 * 255
}

TEST_CASE("PNM round trip and decode errors") {
  TempDir dir;
  for (int c : {1, 3}) {
    const Image img = Noise(31, 17, c, 3);
    WritePnm(dir / "a.pnm", img);
    CHECK(ReadPnm(dir / "a.pnm") == img);
  }
  const std::string junk = "P7\n1 1\n255\nx";
  CHECK_THROWS_AS(DecodePnm(std::span(reinterpret_cast<const std::uint8_t*>(junk.data()), junk.size())),
                  Error);
  const std::string short_data = "P5\n4 4\n255\nabc";
  CHECK_THROWS_AS(
      DecodePnm(std::span(reinterpret_cast<const std::uint8_t*>(short_data.data()), short_data.size())),
      Error);
}

TEST_CASE("detector finds nothing on a constant image") {
  const Image flat(380, 380, 1, 90);
  CHECK(ExtractFeatures(flat, CornerBinaryDetector{}, "flat").size() == 0);
}

TEST_CASE("detector on a checkerboard") {
  const Image board = Checkerboard(380, 20);
  const DescriptorSet a = ExtractFeatures(board, CornerBinaryDetector{}, "board");
  // one keypoint per interior X-junction (multiples of 20, 20..360): 18 x 18
  CHECK(a.size() == 324);
  CHECK(a.kind() == DescriptorKind::kBinaryHamming);
  CHECK(a.dim() == 32);
  for (const Keypoint& k : a.keypoints()) {
    CHECK(k.x >= CornerBinaryDetector::kBorder);
    CHECK(k.x < 380 - CornerBinaryDetector::kBorder);
  }
  const DescriptorSet b = ExtractFeatures(board, CornerBinaryDetector{}, "board");
  CHECK(a == b);
}

TEST_CASE("detector output matches itself between similar images") {
  const Image noise = PreprocessImage(Noise(640, 480, 1, 4));
  const DescriptorSet a = ExtractFeatures(noise, CornerBinaryDetector{}, "n");
  CHECK(a.size() > 0);
  CHECK(a.size() <= 1000);
  const MatchReport self = MatchFeatures(a, a);
  CHECK(self.good_match_count >= a.size() * 9 / 10);
}

TEST_CASE("detector input must be preprocessed") {
  try {
    (void)ExtractFeatures(Image(640, 480, 1), CornerBinaryDetector{}, "x");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDetectorFailure);
  }
}

TEST_CASE("cached detector reads descriptor caches") {
  TempDir dir;
  const DescriptorSet set = ExtractFeatures(Checkerboard(380, 20), CornerBinaryDetector{}, "seq/1");
  WriteDescriptorCache(dir / DescriptorCacheFileName("seq/1"), set);
  const CachedDescriptorDetector cached(dir.path());
  CHECK(ExtractFeatures(Image(380, 380, 1), cached, "seq/1") == set);
  try {
    (void)ExtractFeatures(Image(380, 380, 1), cached, "seq/2");
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingDescriptors);
  }
}
