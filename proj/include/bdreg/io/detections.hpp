#pragma once

// Detection files: one instance per line, "score,x1,y1,...,xn,yn".

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bdreg/decoder.hpp"
#include "bdreg/io/annotations.hpp"

namespace bdreg::io {

inline void write_detections(std::ostream& out, const std::vector<DecodedInstance>& dets) {
  for (const auto& d : dets) {
    out << format_number(d.score);
    for (const Point& p : d.polygon.vertices()) {
      out << ',' << format_number(p.x) << ',' << format_number(p.y);
    }
    out << '\n';
  }
}

inline std::vector<DecodedInstance> parse_detections(std::istream& in, const std::string& source) {
  std::vector<DecodedInstance> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> vals;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      double v = 0.0;
      if (!detail::parse_double(rest.substr(0, comma), v)) {
        detail::fail(source, line_no, "non-numeric field in detection line");
      }
      vals.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (vals.size() % 2 != 1 || vals.size() < 7) {
      detail::fail(source, line_no, "expected score followed by at least 3 x,y pairs");
    }
    std::vector<Point> pts;
    for (std::size_t i = 1; i < vals.size(); i += 2) pts.push_back({vals[i], vals[i + 1]});
    try {
      out.push_back({Polygon(std::move(pts)), static_cast<int>(out.size()), vals[0]});
    } catch (const DegenerateGeometryError& e) {
      detail::fail(source, line_no, e.what());
    }
  }
  return out;
}

inline std::vector<DecodedInstance> read_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open detection file");
  return parse_detections(in, path);
}

}  // namespace bdreg::io
