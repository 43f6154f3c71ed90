#pragma once

// Test fixtures and brute-force oracles. Nothing here calls into the library's
// geometry routines, so the oracles stay independent of the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bdreg/geometry.hpp"

namespace bdreg::oracle {

/// Simple star-shaped polygon: sorted angles with random radii around `c`.
inline std::vector<Point> random_star(std::mt19937_64& rng, Point c, double r_min, double r_max,
                                      int n_min = 3, int n_max = 12) {
  std::uniform_int_distribution<int> count(n_min, n_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  std::vector<double> angles(static_cast<std::size_t>(n));
  // Jittered angular slots keep the polygon simple and non-degenerate.
  for (int i = 0; i < n; ++i) {
    angles[static_cast<std::size_t>(i)] = 2 * std::numbers::pi * (i + 0.15 + 0.7 * unit(rng)) / n;
  }
  std::vector<Point> pts;
  for (double a : angles) {
    const double r = r_min + (r_max - r_min) * unit(rng);
    pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return pts;
}

/// Winding number of `pts` around `q` (0 outside a simple polygon).
inline int winding_number(const std::vector<Point>& pts, Point q) {
  int wn = 0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = pts[i], b = pts[(i + 1) % n];
    const double side = (b.x - a.x) * (q.y - a.y) - (q.x - a.x) * (b.y - a.y);
    if (a.y <= q.y) {
      if (b.y > q.y && side > 0) ++wn;
    } else if (b.y <= q.y && side < 0) {
      --wn;
    }
  }
  return wn;
}

inline double segment_distance(Point a, Point b, Point q) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(a.x + t * dx - q.x, a.y + t * dy - q.y);
}

inline double boundary_distance(const std::vector<Point>& pts, Point q) {
  double best = INFINITY;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    best = std::min(best, segment_distance(pts[i], pts[(i + 1) % pts.size()], q));
  }
  return best;
}

/// IoU of two polygons estimated by sampling a `step`-spaced grid of points.
inline double sampled_iou(const std::vector<Point>& a, const std::vector<Point>& b, double step) {
  double x0 = INFINITY, y0 = INFINITY, x1 = -INFINITY, y1 = -INFINITY;
  for (const auto* poly : {&a, &b}) {
    for (const Point& p : *poly) {
      x0 = std::min(x0, p.x), y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x), y1 = std::max(y1, p.y);
    }
  }
  std::size_t inter = 0, uni = 0;
  for (double y = y0 + step / 2; y < y1; y += step) {
    for (double x = x0 + step / 2; x < x1; x += step) {
      const bool in_a = winding_number(a, {x, y}) != 0;
      const bool in_b = winding_number(b, {x, y}) != 0;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace bdreg::oracle
