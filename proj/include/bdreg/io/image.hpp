#pragma once

// Just enough image I/O: dimensions from PNG / PNM headers, and binary PPM
// output for overlays.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "bdreg/errors.hpp"
#include "bdreg/geometry.hpp"
#include "bdreg/io/annotations.hpp"

namespace bdreg::io {

/// Width and height from a PNG (IHDR) or binary/ASCII PNM header, or nothing
/// for other formats.
inline std::optional<ImageSize> read_image_size(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open image");
  std::array<unsigned char, 24> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  static constexpr std::array<unsigned char, 8> kPng{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (got >= 24 && std::equal(kPng.begin(), kPng.end(), head.begin())) {
    auto be32 = [&](std::size_t o) {
      return (std::uint32_t{head[o]} << 24) | (std::uint32_t{head[o + 1]} << 16) |
             (std::uint32_t{head[o + 2]} << 8) | std::uint32_t{head[o + 3]};
    };
    return ImageSize{static_cast<int>(be32(16)), static_cast<int>(be32(20))};
  }
  if (got >= 2 && head[0] == 'P' && head[1] >= '1' && head[1] <= '6') {
    in.clear();
    in.seekg(2);
    int vals[2];
    for (int& v : vals) {
      for (;;) {
        in >> std::ws;
        if (in.peek() == '#') {
          std::string skip;
          std::getline(in, skip);
          continue;
        }
        break;
      }
      if (!(in >> v)) throw ParseError(path + ": malformed PNM header");
    }
    return ImageSize{vals[0], vals[1]};
  }
  return std::nullopt;
}

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
};

class RgbImage {
 public:
  RgbImage(int width, int height) : width_(width), height_(height), px_(static_cast<std::size_t>(width) * height) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  void set(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < width_ && y < height_) px_[static_cast<std::size_t>(y) * width_ + x] = c;
  }
  Rgb get(int x, int y) const { return px_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Bresenham line between pixel-rounded endpoints; no anti-aliasing.
  void line(Point a, Point b, Rgb c) {
    int x0 = static_cast<int>(std::floor(a.x)), y0 = static_cast<int>(std::floor(a.y));
    const int x1 = static_cast<int>(std::floor(b.x)), y1 = static_cast<int>(std::floor(b.y));
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) err += dy, x0 += sx;
      if (e2 <= dx) err += dx, y0 += sy;
    }
  }

  void outline(const Polygon& p, Rgb c) {
    const auto v = p.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) line(v[i], v[(i + 1) % v.size()], c);
  }

  void save_ppm(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << "P6\n" << width_ << ' ' << height_ << "\n255\n";
    for (const Rgb& c : px_) {
      const char bytes[3] = {static_cast<char>(c.r), static_cast<char>(c.g), static_cast<char>(c.b)};
      out.write(bytes, 3);
    }
    if (!out) throw Error(path + ": write failed");
  }

 private:
  int width_;
  int height_;
  std::vector<Rgb> px_;
};

}  // namespace bdreg::io
