#pragma once

// Incremental (Bowyer-Watson) Delaunay triangulation with exact predicates.
//
// Input points are snapped to a 1/256 px lattice and handled as 64-bit
// integers; orientation and in-circle tests are evaluated in 128-bit integer
// arithmetic, so the triangulation is exact and deterministic.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "bdreg/errors.hpp"
#include "bdreg/geometry.hpp"

namespace bdreg {

inline constexpr double kLatticeScale = 256.0;

struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend constexpr bool operator==(LatticePoint, LatticePoint) = default;
};

inline LatticePoint to_lattice(Point p) {
  return {static_cast<std::int64_t>(std::llround(p.x * kLatticeScale)),
          static_cast<std::int64_t>(std::llround(p.y * kLatticeScale))};
}

inline Point from_lattice(LatticePoint p) {
  return {static_cast<double>(p.x) / kLatticeScale, static_cast<double>(p.y) / kLatticeScale};
}

namespace predicates {

using i128 = __int128;

/// > 0 if a, b, c turn counter-clockwise, < 0 clockwise, 0 collinear.
inline int orient(LatticePoint a, LatticePoint b, LatticePoint c) noexcept {
  const i128 v = static_cast<i128>(b.x - a.x) * (c.y - a.y) -
                 static_cast<i128>(b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

/// > 0 iff d lies strictly inside the circumcircle of CCW triangle (a, b, c).
inline int incircle(LatticePoint a, LatticePoint b, LatticePoint c, LatticePoint d) noexcept {
  const i128 adx = a.x - d.x, ady = a.y - d.y;
  const i128 bdx = b.x - d.x, bdy = b.y - d.y;
  const i128 cdx = c.x - d.x, cdy = c.y - d.y;
  const i128 alift = adx * adx + ady * ady;
  const i128 blift = bdx * bdx + bdy * bdy;
  const i128 clift = cdx * cdx + cdy * cdy;
  const i128 v = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                 clift * (adx * bdy - bdx * ady);
  return (v > 0) - (v < 0);
}

}  // namespace predicates

/// Triangle with CCW vertex indices; `neighbor[i]` is the triangle across the
/// edge opposite `v[i]`, or -1 on the hull.
struct Triangle {
  std::array<int, 3> v{};
  std::array<int, 3> neighbor{-1, -1, -1};
};

class DelaunayTriangulation {
 public:
  /// Triangulates `points`. Coincident points (after snapping) share a
  /// vertex; `vertex_of(i)` maps input index to vertex index. Throws
  /// DegenerateGeometryError for fewer than three distinct or all-collinear
  /// points.
  explicit DelaunayTriangulation(std::span<const Point> points) {
    dedupe(points);
    if (vertices_.size() < 3) {
      throw DegenerateGeometryError("triangulation needs at least 3 distinct points");
    }
    if (all_collinear()) throw DegenerateGeometryError("all points are collinear");
    build();
  }

  std::span<const LatticePoint> vertices() const noexcept { return vertices_; }
  Point vertex_point(int v) const { return from_lattice(vertices_[static_cast<std::size_t>(v)]); }
  std::span<const Triangle> triangles() const noexcept { return triangles_; }
  int vertex_of(std::size_t input_index) const { return input_to_vertex_[input_index]; }
  std::span<const int> input_vertex_map() const noexcept { return input_to_vertex_; }

  double circumradius(const Triangle& t) const {
    const Point a = vertex_point(t.v[0]), b = vertex_point(t.v[1]), c = vertex_point(t.v[2]);
    const double la = distance(b, c), lb = distance(a, c), lc = distance(a, b);
    const double twice_area = std::abs(cross(b - a, c - a));
    if (twice_area <= 0.0) return std::numeric_limits<double>::infinity();
    return la * lb * lc / (2.0 * twice_area);
  }

  /// Distance from each vertex to its nearest other vertex (always a
  /// Delaunay neighbour).
  std::vector<double> nearest_neighbor_distances() const {
    std::vector<double> best(vertices_.size(), std::numeric_limits<double>::infinity());
    for (const Triangle& t : triangles_) {
      for (int i = 0; i < 3; ++i) {
        const int a = t.v[i], b = t.v[(i + 1) % 3];
        const double d = distance(vertex_point(a), vertex_point(b));
        best[a] = std::min(best[a], d);
        best[b] = std::min(best[b], d);
      }
    }
    return best;
  }

  /// Vertex indices of the convex hull in CCW order (collinear hull points
  /// omitted).
  std::vector<int> convex_hull() const {
    std::vector<int> idx(vertices_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const auto& p = vertices_[a];
      const auto& q = vertices_[b];
      return p.x != q.x ? p.x < q.x : p.y < q.y;
    });
    std::vector<int> hull(2 * idx.size());
    std::size_t k = 0;
    for (int i : idx) {
      while (k >= 2 && predicates::orient(vertices_[hull[k - 2]], vertices_[hull[k - 1]],
                                          vertices_[i]) <= 0) {
        --k;
      }
      hull[k++] = i;
    }
    for (std::size_t j = idx.size() - 1, lower = k + 1; j-- > 0;) {
      const int i = idx[j];
      while (k >= lower && predicates::orient(vertices_[hull[k - 2]], vertices_[hull[k - 1]],
                                              vertices_[i]) <= 0) {
        --k;
      }
      hull[k++] = i;
    }
    hull.resize(k - 1);
    return hull;
  }

 private:
  void dedupe(std::span<const Point> points) {
    struct Hash {
      std::size_t operator()(const LatticePoint& p) const noexcept {
        return std::hash<std::int64_t>{}(p.x * 0x9E3779B97F4A7C15LL ^ p.y);
      }
    };
    std::unordered_map<LatticePoint, int, Hash> seen;
    input_to_vertex_.reserve(points.size());
    for (const Point& p : points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw DegenerateGeometryError("triangulation input has a non-finite coordinate");
      }
      const LatticePoint q = to_lattice(p);
      auto [it, inserted] = seen.try_emplace(q, static_cast<int>(vertices_.size()));
      if (inserted) vertices_.push_back(q);
      input_to_vertex_.push_back(it->second);
    }
  }

  bool all_collinear() const {
    for (std::size_t i = 2; i < vertices_.size(); ++i) {
      if (predicates::orient(vertices_[0], vertices_[1], vertices_[i]) != 0) return false;
    }
    return true;
  }

  // Insertion order along a Hilbert curve keeps point-location walks short.
  std::vector<int> insertion_order() const {
    std::int64_t xmin = vertices_[0].x, xmax = xmin, ymin = vertices_[0].y, ymax = ymin;
    for (const auto& p : vertices_) {
      xmin = std::min(xmin, p.x), xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y), ymax = std::max(ymax, p.y);
    }
    const double span = static_cast<double>(std::max<std::int64_t>({xmax - xmin, ymax - ymin, 1}));
    constexpr std::uint32_t kSide = 1u << 16;
    auto hilbert = [](std::uint32_t x, std::uint32_t y) {
      std::uint64_t d = 0;
      for (std::uint32_t s = kSide / 2; s > 0; s /= 2) {
        const std::uint32_t rx = (x & s) > 0, ry = (y & s) > 0;
        d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
        if (ry == 0) {
          if (rx == 1) {
            x = kSide - 1 - x;
            y = kSide - 1 - y;
          }
          std::swap(x, y);
        }
      }
      return d;
    };
    std::vector<std::pair<std::uint64_t, int>> keyed;
    keyed.reserve(vertices_.size());
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const auto qx = static_cast<std::uint32_t>((vertices_[i].x - xmin) / span * (kSide - 1));
      const auto qy = static_cast<std::uint32_t>((vertices_[i].y - ymin) / span * (kSide - 1));
      keyed.emplace_back(hilbert(qx, qy), static_cast<int>(i));
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> order;
    order.reserve(keyed.size());
    for (auto& [key, i] : keyed) order.push_back(i);
    return order;
  }

  const LatticePoint& at(int v) const { return vertices_[static_cast<std::size_t>(v)]; }

  // Triangles touching the vertex at infinity ("ghosts") stand for the
  // half-plane beyond one hull edge; index of that vertex, or -1.
  int ghost_slot(const Triangle& t) const {
    for (int i = 0; i < 3; ++i) {
      if (t.v[i] == inf_) return i;
    }
    return -1;
  }

  // Whether inserting p destroys triangle t. A ghost over hull edge u->w
  // conflicts when p is strictly beyond the edge, or on the open segment.
  bool in_conflict(int t, int p) const {
    const Triangle& tri = work_[static_cast<std::size_t>(t)];
    const int g = ghost_slot(tri);
    if (g < 0) return predicates::incircle(at(tri.v[0]), at(tri.v[1]), at(tri.v[2]), at(p)) > 0;
    const LatticePoint& u = at(tri.v[(g + 1) % 3]);
    const LatticePoint& w = at(tri.v[(g + 2) % 3]);
    const LatticePoint& q = at(p);
    const int o = predicates::orient(u, w, q);
    if (o != 0) return o > 0;
    const std::int64_t dot = (q.x - u.x) * (w.x - u.x) + (q.y - u.y) * (w.y - u.y);
    const std::int64_t len2 = (w.x - u.x) * (w.x - u.x) + (w.y - u.y) * (w.y - u.y);
    return dot > 0 && dot < len2;
  }

  // Visibility walk from `start` to a triangle in conflict with vertex p.
  int locate(int start, int p) const {
    int t = start;
    for (std::size_t steps = 0; steps <= work_.size() * 3 + 8; ++steps) {
      const Triangle& tri = work_[static_cast<std::size_t>(t)];
      const int g = ghost_slot(tri);
      if (g >= 0) {
        if (in_conflict(t, p)) return t;
        t = tri.neighbor[g];
        continue;
      }
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const int a = tri.v[(i + 1) % 3], b = tri.v[(i + 2) % 3];
        if (predicates::orient(at(a), at(b), at(p)) < 0) {
          next = tri.neighbor[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Fallback scan; unreachable for a valid Delaunay triangulation.
    for (std::size_t i = 0; i < work_.size(); ++i) {
      if (alive_[i] && in_conflict(static_cast<int>(i), p)) return static_cast<int>(i);
    }
    return start;
  }

  // Links matching opposite directed edges among `ids`.
  void link(std::initializer_list<int> ids) {
    for (int t : ids) {
      for (int u : ids) {
        if (t == u) continue;
        Triangle& a = work_[static_cast<std::size_t>(t)];
        const Triangle& b = work_[static_cast<std::size_t>(u)];
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            if (a.v[(i + 1) % 3] == b.v[(j + 2) % 3] && a.v[(i + 2) % 3] == b.v[(j + 1) % 3]) {
              a.neighbor[i] = u;
            }
          }
        }
      }
    }
  }

  void build() {
    const int n = static_cast<int>(vertices_.size());
    inf_ = n;
    const std::vector<int> order = insertion_order();
    // Seed with the first non-degenerate triple in insertion order.
    const int a = order[0], b = order[1];
    std::size_t k = 2;
    while (predicates::orient(at(a), at(b), at(order[k])) == 0) ++k;
    int c = order[k];
    int b2 = b;
    if (predicates::orient(at(a), at(b), at(c)) < 0) std::swap(b2, c);
    work_ = {Triangle{{a, b2, c}, {-1, -1, -1}}, Triangle{{c, b2, inf_}, {-1, -1, -1}},
             Triangle{{a, c, inf_}, {-1, -1, -1}}, Triangle{{b2, a, inf_}, {-1, -1, -1}}};
    link({0, 1, 2, 3});
    alive_.assign(4, 1);

    std::vector<int> cavity;
    std::vector<int> stack;
    std::vector<std::uint32_t> mark(4, 0);
    std::uint32_t stamp = 0;
    int last = 0;
    struct BoundaryEdge {
      int a, b, outside, new_tri;
    };
    std::vector<BoundaryEdge> rim;
    std::unordered_map<int, int> starts_at;

    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      const int p = order[oi];
      if (oi < 2 || oi == k) continue;
      ++stamp;
      const int seed = locate(last, p);
      cavity.clear();
      stack.assign(1, seed);
      mark[static_cast<std::size_t>(seed)] = stamp;
      while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        cavity.push_back(t);
        for (int nb : work_[static_cast<std::size_t>(t)].neighbor) {
          if (nb < 0 || mark[static_cast<std::size_t>(nb)] == stamp) continue;
          if (in_conflict(nb, p)) {
            mark[static_cast<std::size_t>(nb)] = stamp;
            stack.push_back(nb);
          }
        }
      }
      rim.clear();
      for (int t : cavity) {
        const Triangle& tri = work_[static_cast<std::size_t>(t)];
        for (int i = 0; i < 3; ++i) {
          const int nb = tri.neighbor[i];
          if (nb >= 0 && mark[static_cast<std::size_t>(nb)] == stamp) continue;
          rim.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb, -1});
        }
      }
      for (int t : cavity) alive_[static_cast<std::size_t>(t)] = 0;
      starts_at.clear();
      for (auto& e : rim) {
        const int id = static_cast<int>(work_.size());
        // New triangle (a, b, p) is CCW because p sees edge a->b from its left.
        work_.push_back(Triangle{{e.a, e.b, p}, {-1, -1, e.outside}});
        alive_.push_back(1);
        mark.push_back(0);
        e.new_tri = id;
        starts_at[e.a] = id;
        if (e.outside >= 0) {
          Triangle& out = work_[static_cast<std::size_t>(e.outside)];
          for (int i = 0; i < 3; ++i) {
            const int oa = out.v[(i + 1) % 3], ob = out.v[(i + 2) % 3];
            if (oa == e.b && ob == e.a) out.neighbor[i] = id;
          }
        }
      }
      // In (a, b, p): neighbor[0] is across (b, p), the triangle starting at b.
      for (const auto& e : rim) {
        Triangle& tri = work_[static_cast<std::size_t>(e.new_tri)];
        tri.neighbor[0] = starts_at.at(e.b);
        const int from_b = tri.neighbor[0];
        work_[static_cast<std::size_t>(from_b)].neighbor[1] = e.new_tri;
      }
      last = rim.empty() ? last : rim.back().new_tri;
    }

    std::vector<int> remap(work_.size(), -1);
    for (std::size_t i = 0; i < work_.size(); ++i) {
      const Triangle& t = work_[i];
      if (!alive_[i] || ghost_slot(t) >= 0) continue;
      remap[i] = static_cast<int>(triangles_.size());
      triangles_.push_back(t);
    }
    for (Triangle& t : triangles_) {
      for (int& nb : t.neighbor) nb = nb >= 0 ? remap[static_cast<std::size_t>(nb)] : -1;
    }
    work_.clear();
    alive_.clear();
  }

  std::vector<LatticePoint> vertices_;
  int inf_ = -1;
  std::vector<int> input_to_vertex_;
  std::vector<Triangle> work_;
  std::vector<std::uint8_t> alive_;
  std::vector<Triangle> triangles_;
};

}  // namespace bdreg
