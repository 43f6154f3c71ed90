#pragma once

// Alpha shapes: Delaunay triangles with circumradius <= radius, grouped into
// edge-connected components, each traced to its outer boundary.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "bdreg/delaunay.hpp"
#include "bdreg/geometry.hpp"

namespace bdreg {

namespace detail {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace detail

/// One edge-connected group of kept triangles.
struct AlphaComponent {
  Polygon outline;
  std::size_t point_count = 0;  // input points (with multiplicity) on the component
};

/// Reusable alpha complex over a fixed point set: the triangulation is built
/// once and can be filtered at any radius.
class AlphaComplex {
 public:
  explicit AlphaComplex(std::span<const Point> points) : dt_(points) {
    radii_.reserve(dt_.triangles().size());
    for (const Triangle& t : dt_.triangles()) radii_.push_back(dt_.circumradius(t));
    multiplicity_.assign(dt_.vertices().size(), 0);
    for (int v : dt_.input_vertex_map()) ++multiplicity_[static_cast<std::size_t>(v)];
  }

  const DelaunayTriangulation& triangulation() const noexcept { return dt_; }

  /// Components at `radius`, most input points first (ties: larger area).
  /// Empty when no triangle survives the filter.
  std::vector<AlphaComponent> components(double radius) const {
    const auto& tris = dt_.triangles();
    std::vector<std::uint8_t> kept(tris.size(), 0);
    for (std::size_t i = 0; i < tris.size(); ++i) kept[i] = radii_[i] <= radius;

    detail::DisjointSets sets(tris.size());
    for (std::size_t i = 0; i < tris.size(); ++i) {
      if (!kept[i]) continue;
      for (int nb : tris[i].neighbor) {
        if (nb >= 0 && kept[static_cast<std::size_t>(nb)]) sets.unite(static_cast<int>(i), nb);
      }
    }
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < tris.size(); ++i) {
      if (kept[i]) groups[sets.find(static_cast<int>(i))].push_back(static_cast<int>(i));
    }

    std::vector<AlphaComponent> out;
    for (const auto& [root, members] : groups) {
      auto outline = trace_outline(members, kept);
      if (!outline) continue;
      std::vector<std::uint8_t> seen(dt_.vertices().size(), 0);
      std::size_t count = 0;
      for (int t : members) {
        for (int v : tris[static_cast<std::size_t>(t)].v) {
          if (!seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = 1;
            count += multiplicity_[static_cast<std::size_t>(v)];
          }
        }
      }
      out.push_back({std::move(*outline), count});
    }
    std::stable_sort(out.begin(), out.end(), [](const AlphaComponent& a, const AlphaComponent& b) {
      if (a.point_count != b.point_count) return a.point_count > b.point_count;
      return polygon_area(a.outline) > polygon_area(b.outline);
    });
    return out;
  }

  /// Smallest radius at which the kept triangles form a single
  /// edge-connected component touching every vertex.
  double connecting_radius() const {
    std::vector<double> sorted;
    sorted.reserve(radii_.size());
    for (double r : radii_) {
      if (std::isfinite(r)) sorted.push_back(r);
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty()) return 0.0;
    std::size_t lo = 0, hi = sorted.size() - 1;
    if (!connected_at(sorted[hi])) return sorted[hi];
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (connected_at(sorted[mid])) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return sorted[lo];
  }

  Polygon convex_hull() const {
    std::vector<Point> v;
    for (int i : dt_.convex_hull()) v.push_back(dt_.vertex_point(i));
    return Polygon(std::move(v));
  }

 private:
  bool connected_at(double radius) const {
    const auto& tris = dt_.triangles();
    const std::size_t nv = dt_.vertices().size();
    detail::DisjointSets sets(tris.size());
    std::vector<std::uint8_t> covered(nv, 0);
    int first = -1;
    for (std::size_t i = 0; i < tris.size(); ++i) {
      if (radii_[i] > radius) continue;
      if (first < 0) first = static_cast<int>(i);
      for (int v : tris[i].v) covered[static_cast<std::size_t>(v)] = 1;
      for (int nb : tris[i].neighbor) {
        if (nb >= 0 && radii_[static_cast<std::size_t>(nb)] <= radius) {
          sets.unite(static_cast<int>(i), nb);
        }
      }
    }
    if (first < 0) return false;
    if (std::find(covered.begin(), covered.end(), 0) != covered.end()) return false;
    const int root = sets.find(first);
    for (std::size_t i = 0; i < tris.size(); ++i) {
      if (radii_[i] <= radius && sets.find(static_cast<int>(i)) != root) return false;
    }
    return true;
  }

  // Boundary edges keep the CCW direction of their triangle, so the region is
  // on their left. At a pinch vertex the walk takes the outgoing edge reached
  // first when turning clockwise from the reversed incoming edge, which splits
  // the boundary into simple loops. The largest positive loop is the outline.
  std::optional<Polygon> trace_outline(const std::vector<int>& members,
                                       const std::vector<std::uint8_t>& kept) const {
    const auto& tris = dt_.triangles();
    struct Edge {
      int a, b;
      bool used = false;
    };
    std::vector<Edge> edges;
    std::multimap<int, std::size_t> outgoing;
    for (int t : members) {
      const Triangle& tri = tris[static_cast<std::size_t>(t)];
      for (int i = 0; i < 3; ++i) {
        const int nb = tri.neighbor[i];
        if (nb >= 0 && kept[static_cast<std::size_t>(nb)]) continue;
        const int a = tri.v[(i + 1) % 3], b = tri.v[(i + 2) % 3];
        outgoing.emplace(a, edges.size());
        edges.push_back({a, b});
      }
    }
    auto angle_of = [&](int from, int to) {
      const Point d = dt_.vertex_point(to) - dt_.vertex_point(from);
      return std::atan2(d.y, d.x);
    };

    std::optional<Polygon> best;
    double best_area = 0.0;
    for (std::size_t start = 0; start < edges.size(); ++start) {
      if (edges[start].used) continue;
      std::vector<Point> loop;
      std::size_t cur = start;
      while (!edges[cur].used) {
        edges[cur].used = true;
        loop.push_back(dt_.vertex_point(edges[cur].a));
        const int at = edges[cur].b;
        const double back = angle_of(at, edges[cur].a);
        std::size_t next = edges.size();
        double best_turn = 10.0;
        auto [lo, hi] = outgoing.equal_range(at);
        for (auto it = lo; it != hi; ++it) {
          if (edges[it->second].used && it->second != start) continue;
          double turn = back - angle_of(at, edges[it->second].b);  // clockwise sweep
          while (turn <= 0.0) turn += 2.0 * std::numbers::pi;
          if (turn < best_turn) {
            best_turn = turn;
            next = it->second;
          }
        }
        if (next == edges.size()) break;
        cur = next;
      }
      if (loop.size() < 3) continue;
      const double area = signed_area(loop);
      if (area <= best_area) continue;
      try {
        Polygon poly(std::move(loop));
        best_area = area;
        best = std::move(poly);
      } catch (const DegenerateGeometryError&) {
      }
    }
    return best;
  }

  DelaunayTriangulation dt_;
  std::vector<double> radii_;
  std::vector<std::size_t> multiplicity_;
};

/// Concave hull(s) of `points` at circumradius threshold `radius`; parts are
/// ordered by the number of input points they hold. Falls back to the convex
/// hull when no triangle survives the filter. Throws DegenerateGeometryError
/// for fewer than 3 distinct or all-collinear points, ParameterError for a
/// non-positive radius.
inline MultiPolygon alpha_shape(std::span<const Point> points, double radius) {
  if (!(radius > 0.0)) throw ParameterError("alpha-shape radius must be positive");
  const AlphaComplex complex(points);
  auto comps = complex.components(radius);
  MultiPolygon out;
  if (comps.empty()) {
    out.parts.push_back(complex.convex_hull());
    return out;
  }
  for (auto& c : comps) out.parts.push_back(std::move(c.outline));
  return out;
}

}  // namespace bdreg
