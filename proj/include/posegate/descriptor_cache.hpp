#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posegate/descriptors.hpp"

namespace posegate {

// Binary layout, little-endian:
//   "PGDC" | u16 version=1 | u8 kind | u32 N | u32 D
//   | N x (f32 x, f32 y) | N x D elements (f32 or u8), row-major.
inline constexpr std::uint16_t kDescriptorCacheVersion = 1;

std::vector<std::uint8_t> EncodeDescriptorCache(const DescriptorSet& set);
DescriptorSet DecodeDescriptorCache(std::span<const std::uint8_t> bytes, std::string image_id);

// "<image_id with '/' replaced by '_'>.pgdc"
std::string DescriptorCacheFileName(std::string_view image_id);

void WriteDescriptorCache(const std::filesystem::path& path, const DescriptorSet& set);
// Throws kMissingDescriptors when the file does not exist.
DescriptorSet ReadDescriptorCache(const std::filesystem::path& path, std::string image_id);

}  // namespace posegate
