#pragma once

// Plain-text annotation files, one polygon per line:
//
//   x1,y1,x2,y2,...,xn,yn[,transcription]
//
// A transcription of "###" marks the polygon as do-not-care. Blank lines and
// lines starting with '#' are skipped. Line order defines the instance ids.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "bdreg/encoder.hpp"
#include "bdreg/errors.hpp"
#include "bdreg/geometry.hpp"

namespace bdreg::io {

inline constexpr std::string_view kIgnoreMarker = "###";

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] inline void fail(const std::string& source, std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << source << ":" << line << ": " << msg;
  throw ParseError(os.str());
}

}  // namespace detail

/// Shortest decimal that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::vector<TextAnnotation> parse_annotations(std::istream& in, const std::string& source) {
  std::vector<TextAnnotation> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::vector<double> coords;
    std::string_view rest = line;
    std::string_view transcription;
    for (;;) {
      const auto comma = rest.find(',');
      const std::string_view tok = rest.substr(0, comma);
      double v = 0.0;
      if (detail::parse_double(tok, v)) {
        coords.push_back(v);
      } else {
        // Everything from the first non-numeric field on is the transcription,
        // which may itself contain commas.
        transcription = detail::trim(rest);
        break;
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (coords.size() % 2 != 0) {
      detail::fail(source, line_no,
                   "odd coordinate count (" + std::to_string(coords.size()) + ")");
    }
    if (coords.size() < 6) {
      detail::fail(source, line_no, "a polygon needs at least 3 points");
    }
    std::vector<Point> pts;
    for (std::size_t i = 0; i < coords.size(); i += 2) pts.push_back({coords[i], coords[i + 1]});
    try {
      Polygon poly(std::move(pts));
      if (!is_simple(poly)) detail::fail(source, line_no, "polygon is self-intersecting");
      out.push_back({std::move(poly), transcription == kIgnoreMarker, static_cast<int>(out.size())});
    } catch (const DegenerateGeometryError& e) {
      detail::fail(source, line_no, e.what());
    }
  }
  return out;
}

inline std::vector<TextAnnotation> read_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open annotation file");
  return parse_annotations(in, path);
}

inline void write_annotations(std::ostream& out, const std::vector<TextAnnotation>& anns) {
  for (const auto& a : anns) {
    bool first = true;
    for (const Point& p : a.polygon.vertices()) {
      if (!first) out << ',';
      out << format_number(p.x) << ',' << format_number(p.y);
      first = false;
    }
    if (a.ignore) out << ',' << kIgnoreMarker;
    out << '\n';
  }
}

struct ImageSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// "name width height" per line.
inline std::map<std::string, ImageSize> read_sizes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open size file");
  std::map<std::string, ImageSize> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ss{std::string(t)};
    std::string name;
    ImageSize s;
    if (!(ss >> name >> s.width >> s.height) || s.width <= 0 || s.height <= 0) {
      detail::fail(path, line_no, "expected '<name> <width> <height>' with positive sizes");
    }
    out[name] = s;
  }
  return out;
}

inline void write_sizes(std::ostream& out, const std::map<std::string, ImageSize>& sizes) {
  for (const auto& [name, s] : sizes) out << name << ' ' << s.width << ' ' << s.height << '\n';
}

inline ImageSize parse_size_spec(std::string_view spec) {
  const auto x = spec.find_first_of("xX");
  ImageSize s;
  if (x == std::string_view::npos ||
      std::from_chars(spec.data(), spec.data() + x, s.width).ec != std::errc() ||
      std::from_chars(spec.data() + x + 1, spec.data() + spec.size(), s.height).ec != std::errc() ||
      s.width <= 0 || s.height <= 0) {
    throw ParseError("image size must look like WIDTHxHEIGHT, got '" + std::string(spec) + "'");
  }
  return s;
}

}  // namespace bdreg::io
