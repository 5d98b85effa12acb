#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace posegate {

// Side length of the preprocessed square image keypoints live in.
inline constexpr int kPreprocessedSize = 380;

enum class DescriptorKind : std::uint8_t {
  kRealL2 = 0,         // f32 elements, L2 distance
  kBinaryHamming = 1,  // u8 elements, Hamming distance over bits
};

struct Keypoint {
  float x = 0.0f;
  float y = 0.0f;
  bool operator==(const Keypoint&) const = default;
};

// Keypoints plus one fixed-length descriptor row per keypoint.
// For binary descriptors dim() counts bytes.
class DescriptorSet {
 public:
  DescriptorSet() = default;

  static DescriptorSet Real(std::string image_id, std::vector<Keypoint> keypoints,
                            std::size_t dim, std::vector<float> data);
  static DescriptorSet Binary(std::string image_id, std::vector<Keypoint> keypoints,
                              std::size_t dim_bytes, std::vector<std::uint8_t> data);

  const std::string& image_id() const { return image_id_; }
  DescriptorKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keypoints_.size(); }
  bool empty() const { return keypoints_.empty(); }

  const std::vector<Keypoint>& keypoints() const { return keypoints_; }
  std::span<const float> real_data() const { return real_; }
  std::span<const std::uint8_t> binary_data() const { return binary_; }

  std::span<const float> real_row(std::size_t i) const {
    return std::span<const float>(real_).subspan(i * dim_, dim_);
  }
  std::span<const std::uint8_t> binary_row(std::size_t i) const {
    return std::span<const std::uint8_t>(binary_).subspan(i * dim_, dim_);
  }

  bool operator==(const DescriptorSet&) const = default;

 private:
  void Validate() const;

  std::string image_id_;
  DescriptorKind kind_ = DescriptorKind::kRealL2;
  std::size_t dim_ = 0;
  std::vector<Keypoint> keypoints_;
  std::vector<float> real_;
  std::vector<std::uint8_t> binary_;
};

// Lowe ratio test settings. A pair is good iff nearest < ratio * second.
struct MatcherConfig {
  double ratio = 0.7;
  bool cross_check = false;
};

void ValidateMatcherConfig(const MatcherConfig& cfg);

struct MatchPair {
  std::uint32_t query_idx = 0;
  std::uint32_t train_idx = 0;
  float distance = 0.0f;
  bool operator==(const MatchPair&) const = default;
};

struct MatchReport {
  std::size_t good_match_count = 0;
  std::vector<MatchPair> pairs;
  bool operator==(const MatchReport&) const = default;
};

// Brute-force matching with the ratio test. Runs the OpenMP kernel when
// available; results are identical to reference::MatchFeatures.
MatchReport MatchFeatures(const DescriptorSet& query, const DescriptorSet& train,
                          const MatcherConfig& cfg = {});

namespace reference {
// Single-threaded kernel kept for testing and benchmarking.
MatchReport MatchFeatures(const DescriptorSet& query, const DescriptorSet& train,
                          const MatcherConfig& cfg = {});
}  // namespace reference

float L2Distance(std::span<const float> a, std::span<const float> b);
std::uint32_t HammingDistance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace posegate
