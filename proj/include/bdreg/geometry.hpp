#pragma once

// Polygon primitives: construction/normalization, measures, offsetting,
// rasterization, nearest-boundary queries and overlap measures.
//
// All coordinates are float64 image pixels; pixel (row, col) covers
// [col, col+1) x [row, row+1) and is represented by its center.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "bdreg/errors.hpp"
#include "bdreg/grid.hpp"

namespace bdreg {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double s, Point a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point, Point) = default;
};

constexpr double dot(Point a, Point b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) noexcept { return norm(a - b); }

/// Vertices closer than this are merged, and vertices within this distance
/// of the line through their neighbours are dropped.
inline constexpr double kVertexTolerance = 1e-6;

inline double signed_area(std::span<const Point> pts) noexcept {
  double acc = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = pts[i];
    const Point& b = pts[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

/// Simple closed contour with at least three vertices, stored counter-clockwise
/// (y axis up; in image coordinates with y down this reads clockwise on screen).
class Polygon {
 public:
  /// Normalizes the contour: rejects non-finite coordinates, merges duplicate
  /// and collinear vertices, and orients it CCW. Throws DegenerateGeometryError
  /// if fewer than three vertices or zero area remain.
  explicit Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    for (const Point& p : vertices_) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw DegenerateGeometryError("polygon has a non-finite coordinate");
      }
    }
    strip_redundant();
    if (vertices_.size() < 3) {
      throw DegenerateGeometryError("polygon needs at least 3 non-collinear vertices");
    }
    const double a = signed_area(vertices_);
    if (!(std::abs(a) > 0.0)) {
      throw DegenerateGeometryError("polygon has zero area");
    }
    if (a < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  }

  std::span<const Point> vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const Point& operator[](std::size_t i) const noexcept { return vertices_[i]; }

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  void strip_redundant() {
    bool changed = true;
    while (changed && vertices_.size() >= 3) {
      changed = false;
      std::vector<Point> kept;
      kept.reserve(vertices_.size());
      for (const Point& p : vertices_) {
        if (!kept.empty() && distance(kept.back(), p) <= kVertexTolerance) continue;
        kept.push_back(p);
      }
      while (kept.size() > 1 && distance(kept.front(), kept.back()) <= kVertexTolerance) {
        kept.pop_back();
      }
      if (kept.size() != vertices_.size()) changed = true;
      vertices_ = std::move(kept);
      if (vertices_.size() < 3) return;

      const std::size_t n = vertices_.size();
      std::vector<Point> out;
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Point& prev = vertices_[(i + n - 1) % n];
        const Point& cur = vertices_[i];
        const Point& next = vertices_[(i + 1) % n];
        const double base = distance(prev, next);
        const double height =
            base > 0.0 ? std::abs(cross(next - prev, cur - prev)) / base : distance(prev, cur);
        // Spikes (cur beyond the segment) are collinear too; both are dropped.
        if (height <= kVertexTolerance) {
          changed = true;
          continue;
        }
        out.push_back(cur);
      }
      vertices_ = std::move(out);
    }
  }

  std::vector<Point> vertices_;
};

/// Zero or more pairwise non-overlapping polygons.
struct MultiPolygon {
  std::vector<Polygon> parts;

  bool empty() const noexcept { return parts.empty(); }
  std::size_t size() const noexcept { return parts.size(); }
};

inline double polygon_area(const Polygon& p) { return signed_area(p.vertices()); }

inline double polygon_area(const MultiPolygon& mp) {
  double acc = 0.0;
  for (const auto& part : mp.parts) acc += polygon_area(part);
  return acc;
}

inline double polygon_perimeter(const Polygon& p) {
  const auto v = p.vertices();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += distance(v[i], v[(i + 1) % v.size()]);
  return acc;
}

/// Inward offset distance realizing shrink ratio `alpha`:
/// d = Area * (1 - alpha^2) / Perimeter.
inline double shrink_offset(const Polygon& p, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "shrink ratio alpha must be in (0, 1], got " << alpha;
    throw ParameterError(os.str());
  }
  return polygon_area(p) * (1.0 - alpha * alpha) / polygon_perimeter(p);
}

/// Outward offset distance realizing expansion ratio `beta`:
/// d = Area * (beta^2 - 1) / Perimeter.
inline double expand_offset(const Polygon& p, double beta) {
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "expansion ratio beta must be >= 1, got " << beta;
    throw ParameterError(os.str());
  }
  return polygon_area(p) * (beta * beta - 1.0) / polygon_perimeter(p);
}

inline Polygon translated(const Polygon& p, Point by) {
  std::vector<Point> v(p.vertices().begin(), p.vertices().end());
  for (auto& q : v) q = q + by;
  return Polygon(std::move(v));
}

inline Polygon scaled(const Polygon& p, double s, Point origin = {}) {
  std::vector<Point> v(p.vertices().begin(), p.vertices().end());
  for (auto& q : v) q = origin + s * (q - origin);
  return Polygon(std::move(v));
}

namespace detail {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/true>;
using BgMultiPolygon = bg::model::multi_polygon<BgPolygon>;

inline BgPolygon to_bg(const Polygon& p) {
  BgPolygon out;
  auto& ring = out.outer();
  ring.reserve(p.size() + 1);
  for (const Point& q : p.vertices()) ring.emplace_back(q.x, q.y);
  ring.emplace_back(p[0].x, p[0].y);
  return out;
}

inline BgMultiPolygon to_bg(const MultiPolygon& mp) {
  BgMultiPolygon out;
  for (const auto& part : mp.parts) out.push_back(to_bg(part));
  return out;
}

// Keeps outer rings only; slivers that normalize away are dropped.
inline MultiPolygon from_bg(const BgMultiPolygon& mp) {
  MultiPolygon out;
  for (const auto& poly : mp) {
    std::vector<Point> v;
    const auto& ring = poly.outer();
    v.reserve(ring.size());
    for (const auto& q : ring) v.push_back({q.x(), q.y()});
    if (v.size() > 1 && v.front() == v.back()) v.pop_back();
    try {
      Polygon p(std::move(v));
      if (polygon_area(p) > 1e-9) out.parts.push_back(std::move(p));
    } catch (const DegenerateGeometryError&) {
    }
  }
  return out;
}

inline int points_per_circle(double radius, double arc_tolerance) {
  const double r = std::abs(radius);
  if (r <= arc_tolerance) return 8;
  const double step = 2.0 * std::acos(1.0 - arc_tolerance / r);
  const double n = std::ceil(2.0 * std::numbers::pi / step);
  return std::max(8, static_cast<int>(std::min(n, 4096.0)));
}

}  // namespace detail

/// Maximum distance between a round join's chord and its true arc.
inline constexpr double kArcTolerance = 0.25;

/// Offsets `p` by `delta` pixels with round joins: negative shrinks, positive
/// expands. An inward offset beyond the inradius yields an empty result; a
/// concave polygon may split into several parts.
inline MultiPolygon offset_polygon(const Polygon& p, double delta) {
  if (delta == 0.0) return MultiPolygon{{p}};
  namespace bg = boost::geometry;
  namespace bs = bg::strategy::buffer;
  const int ppc = detail::points_per_circle(delta, kArcTolerance);
  bs::distance_symmetric<double> dist(delta);
  bs::join_round join(ppc);
  bs::end_round end(ppc);
  bs::point_circle circle(ppc);
  bs::side_straight side;
  detail::BgMultiPolygon in;
  in.push_back(detail::to_bg(p));
  detail::BgMultiPolygon out;
  bg::buffer(in, out, dist, side, join, end, circle);
  return detail::from_bg(out);
}

/// Even-odd point-in-polygon test with the half-open crossing rule used by
/// `rasterize`.
inline bool contains(const Polygon& p, Point q) noexcept {
  const auto v = p.vertices();
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Point& a = v[i];
    const Point& b = v[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

inline bool contains(const MultiPolygon& mp, Point q) noexcept {
  return std::any_of(mp.parts.begin(), mp.parts.end(),
                     [&](const Polygon& p) { return contains(p, q); });
}

/// Sets every pixel of `mask` whose center lies inside `p`; pixels already set
/// stay set.
inline void rasterize_into(const Polygon& p, RasterMask& mask) {
  const auto v = p.vertices();
  double ymin = v[0].y, ymax = v[0].y;
  for (const Point& q : v) {
    ymin = std::min(ymin, q.y);
    ymax = std::max(ymax, q.y);
  }
  const double hmax = static_cast<double>(mask.height());
  const int row0 = static_cast<int>(std::clamp(std::floor(ymin - 0.5), 0.0, hmax));
  const int row1 = static_cast<int>(std::clamp(std::ceil(ymax), -1.0, hmax - 1.0));
  std::vector<double> xs;
  for (int row = row0; row <= row1; ++row) {
    const double y = row + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      const Point& a = v[i];
      const Point& b = v[j];
      if ((a.y > y) != (b.y > y)) xs.push_back((b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x);
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Centers c with xs[k] <= c < xs[k+1] have an odd number of crossings
      // strictly to their right.
      const double lo = xs[k];
      const double hi = xs[k + 1];
      if (!(hi > 0.0) || lo >= mask.width()) continue;
      int col = static_cast<int>(std::clamp(std::floor(lo) - 1.0, 0.0, double(mask.width())));
      while (col + 0.5 < lo) ++col;
      for (; col < mask.width() && col + 0.5 < hi; ++col) mask(row, col) = 1;
    }
  }
}

/// Pixel (row, col) is set iff its center (col + 0.5, row + 0.5) lies inside
/// some part.
inline RasterMask rasterize(const MultiPolygon& mp, int width, int height) {
  if (width <= 0 || height <= 0) throw ParameterError("raster dimensions must be positive");
  RasterMask mask(width, height);
  for (const auto& part : mp.parts) rasterize_into(part, mask);
  return mask;
}

inline RasterMask rasterize(const Polygon& p, int width, int height) {
  return rasterize(MultiPolygon{{p}}, width, height);
}

struct BoundaryHit {
  Point point;
  double distance = 0.0;
};

inline Point closest_on_segment(Point a, Point b, Point q) noexcept {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return a;
  const double t = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

/// Closest point on the boundary of `p` to `q` (edges included). Ties keep the
/// earliest edge.
inline BoundaryHit nearest_boundary_point(const Polygon& p, Point q) noexcept {
  const auto v = p.vertices();
  BoundaryHit best{v[0], std::numeric_limits<double>::infinity()};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point c = closest_on_segment(v[i], v[(i + 1) % v.size()], q);
    const Point diff = c - q;
    const double d2 = dot(diff, diff);
    if (d2 < best_d2) {
      best_d2 = d2;
      best.point = c;
    }
  }
  best.distance = std::sqrt(best_d2);
  return best;
}

inline double intersection_area(const Polygon& a, const Polygon& b) {
  namespace bg = boost::geometry;
  detail::BgMultiPolygon out;
  bg::intersection(detail::to_bg(a), detail::to_bg(b), out);
  return bg::area(out);
}

/// Intersection over union; 1 for identical shapes, 0 for disjoint ones.
inline double polygon_iou(const Polygon& a, const Polygon& b) {
  const double inter = intersection_area(a, b);
  const double uni = polygon_area(a) + polygon_area(b) - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// False when two edges of the closed outline cross or touch; used to
/// validate input annotations.
inline bool is_simple(const Polygon& p) {
  namespace bg = boost::geometry;
  return !bg::intersects(detail::to_bg(p));
}

inline Polygon make_rectangle(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

/// Rectangle of size w x h centered at `c`, rotated by `angle_rad`.
inline Polygon make_rotated_rectangle(Point c, double w, double h, double angle_rad) {
  const double cs = std::cos(angle_rad), sn = std::sin(angle_rad);
  std::vector<Point> v;
  for (auto [sx, sy] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) {
    const double lx = 0.5 * w * sx, ly = 0.5 * h * sy;
    v.push_back({c.x + cs * lx - sn * ly, c.y + sn * lx + cs * ly});
  }
  return Polygon(std::move(v));
}

}  // namespace bdreg
