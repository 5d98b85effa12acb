#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace posegate {

// 8-bit interleaved image, row-major.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0);

  std::uint8_t at(int x, int y, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool operator==(const Image&) const = default;
};

inline constexpr int kResizeSize = 384;

// Throws kDecode when dimensions or the pixel buffer are inconsistent.
void ValidateImage(const Image& img);

// Half-pixel-centred bilinear resampling, rounded to nearest.
Image ResizeBilinear(const Image& src, int width, int height);
Image CenterCrop(const Image& src, int width, int height);
// 0.299 R + 0.587 G + 0.114 B, rounded. Gray inputs keep channel 0.
Image ToGray(const Image& src);

// Resize to 384x384, centre-crop to 380x380, convert to grayscale.
Image PreprocessImage(const Image& raw);

// Binary PGM (P5) / PPM (P6) with maxval 255.
Image DecodePnm(std::span<const std::uint8_t> bytes);
Image ReadPnm(const std::filesystem::path& path);
void WritePnm(const std::filesystem::path& path, const Image& img);

}  // namespace posegate
