#pragma once

// Map bundle: one binary file per image.
//
//   offset  size  field
//   0       8     magic "BDREGMAP"
//   8       2     format version (uint16, currently 1)
//   10      2     kind (uint16): 1 = label maps, 2 = score maps
//   12      1     expression (uint8): 0 = bidirectional, 1 = msr
//   13      3     reserved, zero
//   16      4     width (uint32)
//   20      4     height (uint32)
//   24      ...   planes, channel-major, each row-major width*height values
//
// Label planes: text_region u8, text_kernel u8, train_mask u8,
//               instance_id i32, offset_x f32, offset_y f32,
//               orientation_x f32, orientation_y f32.
// Score planes: text_region f32, text_kernel f32, offset_x f32, offset_y f32,
//               orientation_x f32, orientation_y f32.
//
// All multi-byte values are little-endian; floats are IEEE-754 binary32.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>

#include "bdreg/decoder.hpp"
#include "bdreg/encoder.hpp"
#include "bdreg/errors.hpp"

namespace bdreg::io {

inline constexpr std::array<char, 8> kBundleMagic{'B', 'D', 'R', 'E', 'G', 'M', 'A', 'P'};
inline constexpr std::uint16_t kBundleVersion = 1;
inline constexpr std::size_t kBundleHeaderSize = 24;

enum class BundleKind : std::uint16_t { labels = 1, scores = 2 };

namespace detail {

template <typename T>
void put(std::ostream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw ParseError("map bundle is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

template <typename T>
void put_plane(std::ostream& out, const Grid<T>& g) {
  if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
    out.write(reinterpret_cast<const char*>(g.values().data()),
              static_cast<std::streamsize>(g.size() * sizeof(T)));
  } else {
    for (const T& v : g.values()) put(out, v);
  }
}

template <typename T>
void get_plane(std::istream& in, Grid<T>& g) {
  if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
    if (!in.read(reinterpret_cast<char*>(g.values().data()),
                 static_cast<std::streamsize>(g.size() * sizeof(T)))) {
      throw ParseError("map bundle is truncated");
    }
  } else {
    for (T& v : g.values()) v = get<T>(in);
  }
}

inline void put_header(std::ostream& out, BundleKind kind, Expression mode, int w, int h) {
  out.write(kBundleMagic.data(), kBundleMagic.size());
  put<std::uint16_t>(out, kBundleVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(kind));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(mode));
  for (int i = 0; i < 3; ++i) put<std::uint8_t>(out, 0);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h));
}

}  // namespace detail

inline void write_bundle(std::ostream& out, const LabelMaps& m) {
  detail::put_header(out, BundleKind::labels, m.mode, m.width(), m.height());
  detail::put_plane(out, m.text_region);
  detail::put_plane(out, m.text_kernel);
  detail::put_plane(out, m.train_mask);
  detail::put_plane(out, m.instance_id);
  detail::put_plane(out, m.offset.x);
  detail::put_plane(out, m.offset.y);
  detail::put_plane(out, m.orientation.x);
  detail::put_plane(out, m.orientation.y);
}

inline void write_bundle(std::ostream& out, const ScoreMaps& m, Expression mode) {
  detail::put_header(out, BundleKind::scores, mode, m.width(), m.height());
  detail::put_plane(out, m.text_region);
  detail::put_plane(out, m.text_kernel);
  detail::put_plane(out, m.offset.x);
  detail::put_plane(out, m.offset.y);
  detail::put_plane(out, m.orientation.x);
  detail::put_plane(out, m.orientation.y);
}

struct ScoreBundle {
  ScoreMaps maps;
  Expression mode = Expression::bidirectional;
};

using Bundle = std::variant<LabelMaps, ScoreBundle>;

inline Bundle read_bundle(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kBundleMagic) {
    throw ParseError("not a map bundle (bad magic)");
  }
  const auto version = detail::get<std::uint16_t>(in);
  if (version != kBundleVersion) {
    throw ParseError("unsupported map bundle version " + std::to_string(version));
  }
  const auto kind = detail::get<std::uint16_t>(in);
  const auto mode_raw = detail::get<std::uint8_t>(in);
  for (int i = 0; i < 3; ++i) detail::get<std::uint8_t>(in);
  const auto w = detail::get<std::uint32_t>(in);
  const auto h = detail::get<std::uint32_t>(in);
  if (mode_raw > 1) throw ParseError("map bundle has an unknown expression id");
  if (w > (1u << 16) || h > (1u << 16)) throw ParseError("map bundle dimensions are implausible");
  const auto mode = static_cast<Expression>(mode_raw);
  const int iw = static_cast<int>(w), ih = static_cast<int>(h);

  if (kind == static_cast<std::uint16_t>(BundleKind::labels)) {
    LabelMaps m(iw, ih, mode);
    detail::get_plane(in, m.text_region);
    detail::get_plane(in, m.text_kernel);
    detail::get_plane(in, m.train_mask);
    detail::get_plane(in, m.instance_id);
    detail::get_plane(in, m.offset.x);
    detail::get_plane(in, m.offset.y);
    detail::get_plane(in, m.orientation.x);
    detail::get_plane(in, m.orientation.y);
    return m;
  }
  if (kind == static_cast<std::uint16_t>(BundleKind::scores)) {
    ScoreBundle b{ScoreMaps(iw, ih), mode};
    detail::get_plane(in, b.maps.text_region);
    detail::get_plane(in, b.maps.text_kernel);
    detail::get_plane(in, b.maps.offset.x);
    detail::get_plane(in, b.maps.offset.y);
    detail::get_plane(in, b.maps.orientation.x);
    detail::get_plane(in, b.maps.orientation.y);
    return b;
  }
  throw ParseError("unknown map bundle kind " + std::to_string(kind));
}

inline void save_bundle(const std::string& path, const LabelMaps& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  write_bundle(out, m);
  if (!out) throw Error(path + ": write failed");
}

inline Bundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open map bundle");
  try {
    return read_bundle(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Score maps from either bundle kind; label bundles become perfect scores.
inline ScoreBundle as_scores(const Bundle& b) {
  if (const auto* labels = std::get_if<LabelMaps>(&b)) {
    return {perfect_scores(*labels), labels->mode};
  }
  return std::get<ScoreBundle>(b);
}

}  // namespace bdreg::io
