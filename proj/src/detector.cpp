#include "posegate/detector.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <tuple>
#include <vector>

#include "posegate/descriptor_cache.hpp"
#include "posegate/error.hpp"

namespace posegate {

namespace {

struct TestPair {
  std::int8_t ax, ay, bx, by;
};

constexpr std::uint64_t SplitMix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::array<TestPair, CornerBinaryDetector::kDescriptorBytes * 8> MakePattern() {
  std::array<TestPair, CornerBinaryDetector::kDescriptorBytes * 8> pattern{};
  std::uint64_t state = 0x5eed'b71e'f00dULL;
  constexpr int span = 2 * CornerBinaryDetector::kPatchRadius + 1;
  auto coord = [&]() {
    return static_cast<std::int8_t>(static_cast<int>(SplitMix(state) % span) -
                                    CornerBinaryDetector::kPatchRadius);
  };
  for (TestPair& p : pattern) {
    do {
      p = {coord(), coord(), coord(), coord()};
    } while (p.ax == p.bx && p.ay == p.by);
  }
  return pattern;
}

constexpr auto kPattern = MakePattern();

// Mean over a (2r+1)^2 window using an integral image; the window is always
// inside the image for points at least kBorder from the edge.
std::vector<float> BoxSmooth(const Image& img, int r) {
  const int w = img.width;
  const int h = img.height;
  std::vector<std::uint32_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    std::uint32_t row = 0;
    for (int x = 0; x < w; ++x) {
      row += img.at(x, y);
      integral[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
          integral[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
    }
  }
  std::vector<float> out(static_cast<std::size_t>(w) * h, 0.0f);
  const float area = static_cast<float>((2 * r + 1) * (2 * r + 1));
  for (int y = r; y < h - r; ++y) {
    for (int x = r; x < w - r; ++x) {
      const auto at = [&](int xx, int yy) { return integral[static_cast<std::size_t>(yy) * (w + 1) + xx]; };
      const std::uint32_t s = at(x + r + 1, y + r + 1) - at(x - r, y + r + 1) -
                              at(x + r + 1, y - r) + at(x - r, y - r);
      out[static_cast<std::size_t>(y) * w + x] = static_cast<float>(s) / area;
    }
  }
  return out;
}

std::vector<double> HarrisResponse(const Image& img, double k) {
  const int w = img.width;
  const int h = img.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> ixx(n, 0.0), iyy(n, 0.0), ixy(n, 0.0);
  constexpr double kNorm = 1.0 / (4.0 * 255.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const auto p = [&](int dx, int dy) { return static_cast<double>(img.at(x + dx, y + dy)); };
      const double gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1) - p(-1, -1) - 2 * p(-1, 0) - p(-1, 1)) * kNorm;
      const double gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1) - p(-1, -1) - 2 * p(0, -1) - p(1, -1)) * kNorm;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ixx[i] = gx * gx;
      iyy[i] = gy * gy;
      ixy[i] = gx * gy;
    }
  }
  std::vector<double> response(n, 0.0);
  constexpr int kWin = 2;
  for (int y = kWin + 1; y < h - kWin - 1; ++y) {
    for (int x = kWin + 1; x < w - kWin - 1; ++x) {
      double a = 0.0, b = 0.0, c = 0.0;
      for (int dy = -kWin; dy <= kWin; ++dy) {
        for (int dx = -kWin; dx <= kWin; ++dx) {
          const std::size_t i = static_cast<std::size_t>(y + dy) * w + x + dx;
          a += ixx[i];
          b += iyy[i];
          c += ixy[i];
        }
      }
      response[static_cast<std::size_t>(y) * w + x] = a * b - c * c - k * (a + b) * (a + b);
    }
  }
  return response;
}

}  // namespace

DescriptorSet CornerBinaryDetector::Detect(const Image& img, const std::string& image_id) const {
  const int w = img.width;
  const int h = img.height;
  const std::vector<double> response = HarrisResponse(img, options_.harris_k);
  double strongest = 0.0;
  for (double r : response) strongest = std::max(strongest, r);
  const double threshold = std::max(options_.min_response, options_.relative_response * strongest);

  // Non-maximum suppression; equal responses resolve to the first pixel in
  // raster order.
  struct Candidate {
    double response;
    int x, y;
  };
  std::vector<Candidate> corners;
  const int nr = options_.nms_radius;
  for (int y = kBorder; y < h - kBorder; ++y) {
    for (int x = kBorder; x < w - kBorder; ++x) {
      const double r = response[static_cast<std::size_t>(y) * w + x];
      if (!(r > threshold)) continue;
      bool is_max = true;
      for (int dy = -nr; dy <= nr && is_max; ++dy) {
        for (int dx = -nr; dx <= nr; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int xx = x + dx;
          const int yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
          const double o = response[static_cast<std::size_t>(yy) * w + xx];
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (o > r || (earlier && o == r)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) corners.push_back({r, x, y});
    }
  }
  std::stable_sort(corners.begin(), corners.end(),
                   [](const Candidate& a, const Candidate& b) { return a.response > b.response; });
  if (corners.size() > options_.max_keypoints) corners.resize(options_.max_keypoints);

  const std::vector<float> smooth = BoxSmooth(img, kSmoothRadius);
  std::vector<Keypoint> keypoints;
  std::vector<std::uint8_t> data(corners.size() * kDescriptorBytes, 0);
  keypoints.reserve(corners.size());
  for (std::size_t n = 0; n < corners.size(); ++n) {
    const Candidate& c = corners[n];
    keypoints.push_back({static_cast<float>(c.x), static_cast<float>(c.y)});
    for (std::size_t bit = 0; bit < kPattern.size(); ++bit) {
      const TestPair& t = kPattern[bit];
      const float a = smooth[static_cast<std::size_t>(c.y + t.ay) * w + c.x + t.ax];
      const float b = smooth[static_cast<std::size_t>(c.y + t.by) * w + c.x + t.bx];
      if (a < b) data[n * kDescriptorBytes + bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
  return DescriptorSet::Binary(image_id, std::move(keypoints), kDescriptorBytes, std::move(data));
}

DescriptorSet CachedDescriptorDetector::Detect(const Image&, const std::string& image_id) const {
  return ReadDescriptorCache(directory_ / DescriptorCacheFileName(image_id), image_id);
}

DescriptorSet ExtractFeatures(const Image& img, const FeatureDetector& detector,
                              const std::string& image_id) {
  ValidateImage(img);
  if (img.width != kPreprocessedSize || img.height != kPreprocessedSize || img.channels != 1) {
    throw Error(ErrorCode::kDetectorFailure, "detector expects a 380x380 grayscale image");
  }
  try {
    return detector.Detect(img, image_id);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kDetectorFailure, e.what());
  }
}

}  // namespace posegate
