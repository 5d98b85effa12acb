#include "posegate/descriptor_cache.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "posegate/error.hpp"

namespace posegate {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'D', 'C'};
constexpr std::size_t kHeaderSize = 4 + 2 + 1 + 4 + 4;

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xff));
}

void PutF32(std::vector<std::uint8_t>& out, float v) { PutU32(out, std::bit_cast<std::uint32_t>(v)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::kParse, "descriptor cache truncated");
  }
  std::uint8_t U8() {
    Need(1);
    return bytes_[pos_++];
  }
  std::uint16_t U16() {
    Need(2);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return v;
  }
  float F32() { return std::bit_cast<float>(U32()); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> EncodeDescriptorCache(const DescriptorSet& set) {
  const std::size_t n = set.size();
  const bool real = set.kind() == DescriptorKind::kRealL2;
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + n * 8 + n * set.dim() * (real ? 4 : 1));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  PutU16(out, kDescriptorCacheVersion);
  out.push_back(static_cast<std::uint8_t>(set.kind()));
  PutU32(out, static_cast<std::uint32_t>(n));
  PutU32(out, static_cast<std::uint32_t>(set.dim()));
  for (const Keypoint& kp : set.keypoints()) {
    PutF32(out, kp.x);
    PutF32(out, kp.y);
  }
  if (real) {
    for (float v : set.real_data()) PutF32(out, v);
  } else {
    out.insert(out.end(), set.binary_data().begin(), set.binary_data().end());
  }
  return out;
}

DescriptorSet DecodeDescriptorCache(std::span<const std::uint8_t> bytes, std::string image_id) {
  Reader r(bytes);
  r.Need(4);
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw Error(ErrorCode::kParse, "descriptor cache has bad magic");
  }
  for (int k = 0; k < 4; ++k) r.U8();
  const std::uint16_t version = r.U16();
  if (version != kDescriptorCacheVersion) {
    throw Error(ErrorCode::kParse, "unsupported descriptor cache version " + std::to_string(version));
  }
  const std::uint8_t kind = r.U8();
  if (kind > 1) throw Error(ErrorCode::kParse, "unknown descriptor kind " + std::to_string(kind));
  const std::uint32_t n = r.U32();
  const std::uint32_t dim = r.U32();
  const std::size_t elem = kind == 0 ? 4 : 1;
  const std::size_t expected = static_cast<std::size_t>(n) * 8 + static_cast<std::size_t>(n) * dim * elem;
  if (r.remaining() != expected) {
    throw Error(ErrorCode::kParse, "descriptor cache payload size mismatch");
  }
  std::vector<Keypoint> keypoints(n);
  for (Keypoint& kp : keypoints) {
    kp.x = r.F32();
    kp.y = r.F32();
  }
  if (kind == 0) {
    std::vector<float> data(static_cast<std::size_t>(n) * dim);
    for (float& v : data) v = r.F32();
    return DescriptorSet::Real(std::move(image_id), std::move(keypoints), dim, std::move(data));
  }
  std::vector<std::uint8_t> data(static_cast<std::size_t>(n) * dim);
  for (std::uint8_t& v : data) v = r.U8();
  return DescriptorSet::Binary(std::move(image_id), std::move(keypoints), dim, std::move(data));
}

std::string DescriptorCacheFileName(std::string_view image_id) {
  std::string name(image_id);
  std::replace(name.begin(), name.end(), '/', '_');
  return name + ".pgdc";
}

void WriteDescriptorCache(const std::filesystem::path& path, const DescriptorSet& set) {
  const std::vector<std::uint8_t> bytes = EncodeDescriptorCache(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

DescriptorSet ReadDescriptorCache(const std::filesystem::path& path, std::string image_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingDescriptors,
                "no descriptor cache for " + image_id + " at " + path.string());
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return DecodeDescriptorCache(bytes, std::move(image_id));
}

}  // namespace posegate
