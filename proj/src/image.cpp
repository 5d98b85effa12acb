#include "posegate/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "posegate/descriptors.hpp"
#include "posegate/error.hpp"

namespace posegate {

Image::Image(int w, int h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c),
      pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c),
             fill) {}

void ValidateImage(const Image& img) {
  if (img.width < 1 || img.height < 1) throw Error(ErrorCode::kDecode, "image has no pixels");
  if (img.channels < 1 || img.channels > 4) {
    throw Error(ErrorCode::kDecode, "unsupported channel count " + std::to_string(img.channels));
  }
  const std::size_t expected = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (img.pixels.size() != expected) throw Error(ErrorCode::kDecode, "pixel buffer size mismatch");
}

namespace {

std::uint8_t RoundToByte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

struct Tap {
  int i0;
  int i1;
  double frac;
};

std::vector<Tap> BuildTaps(int src, int dst) {
  std::vector<Tap> taps(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int d = 0; d < dst; ++d) {
    double s = (d + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int i0 = static_cast<int>(std::floor(s));
    taps[d] = {i0, std::min(i0 + 1, src - 1), s - i0};
  }
  return taps;
}

}  // namespace

Image ResizeBilinear(const Image& src, int width, int height) {
  ValidateImage(src);
  const std::vector<Tap> xs = BuildTaps(src.width, width);
  const std::vector<Tap> ys = BuildTaps(src.height, height);
  Image out(width, height, src.channels);
  for (int y = 0; y < height; ++y) {
    const Tap& ty = ys[y];
    for (int x = 0; x < width; ++x) {
      const Tap& tx = xs[x];
      for (int c = 0; c < src.channels; ++c) {
        const double top = (1.0 - tx.frac) * src.at(tx.i0, ty.i0, c) + tx.frac * src.at(tx.i1, ty.i0, c);
        const double bottom =
            (1.0 - tx.frac) * src.at(tx.i0, ty.i1, c) + tx.frac * src.at(tx.i1, ty.i1, c);
        out.at(x, y, c) = RoundToByte((1.0 - ty.frac) * top + ty.frac * bottom);
      }
    }
  }
  return out;
}

Image CenterCrop(const Image& src, int width, int height) {
  ValidateImage(src);
  if (width > src.width || height > src.height) {
    throw Error(ErrorCode::kInvalidArgument, "crop larger than image");
  }
  const int ox = (src.width - width) / 2;
  const int oy = (src.height - height) / 2;
  Image out(width, height, src.channels);
  for (int y = 0; y < height; ++y) {
    const auto row = src.pixels.begin() +
                     (static_cast<std::ptrdiff_t>(y + oy) * src.width + ox) * src.channels;
    std::copy(row, row + static_cast<std::ptrdiff_t>(width) * src.channels,
              out.pixels.begin() + static_cast<std::ptrdiff_t>(y) * width * src.channels);
  }
  return out;
}

Image ToGray(const Image& src) {
  ValidateImage(src);
  Image out(src.width, src.height, 1);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) {
      if (src.channels >= 3) {
        out.at(x, y) = RoundToByte(0.299 * src.at(x, y, 0) + 0.587 * src.at(x, y, 1) +
                                   0.114 * src.at(x, y, 2));
      } else {
        out.at(x, y) = src.at(x, y, 0);
      }
    }
  }
  return out;
}

Image PreprocessImage(const Image& raw) {
  return ToGray(CenterCrop(ResizeBilinear(raw, kResizeSize, kResizeSize), kPreprocessedSize,
                           kPreprocessedSize));
}

namespace {

class PnmHeader {
 public:
  explicit PnmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  int NextInt() {
    SkipSpaceAndComments();
    int value = 0;
    bool any = false;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      any = true;
      if (value > 1 << 20) throw Error(ErrorCode::kDecode, "PNM header value too large");
    }
    if (!any) throw Error(ErrorCode::kDecode, "malformed PNM header");
    return value;
  }
  std::size_t pos() const { return pos_; }
  void Skip(std::size_t n) { pos_ += n; }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image DecodePnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::kDecode, "not a binary PGM/PPM image");
  }
  const int channels = bytes[1] == '5' ? 1 : 3;
  PnmHeader header(bytes.subspan(2));
  const int w = header.NextInt();
  const int h = header.NextInt();
  const int maxval = header.NextInt();
  if (maxval != 255) throw Error(ErrorCode::kDecode, "only maxval 255 is supported");
  header.Skip(1);  // single whitespace before raster
  const std::size_t start = 2 + header.pos();
  Image img(w, h, channels);
  if (w < 1 || h < 1) throw Error(ErrorCode::kDecode, "image has no pixels");
  if (bytes.size() < start + img.pixels.size()) throw Error(ErrorCode::kDecode, "PNM raster truncated");
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(start), img.pixels.size(), img.pixels.begin());
  return img;
}

Image ReadPnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return DecodePnm(bytes);
}

void WritePnm(const std::filesystem::path& path, const Image& img) {
  ValidateImage(img);
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "PNM output needs 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
}

}  // namespace posegate
