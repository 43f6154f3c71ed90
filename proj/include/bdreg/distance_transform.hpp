#pragma once

// Exact Euclidean distance transform (Meijster, Roerdink & Hesselink two-pass
// scheme) in integer arithmetic, plus nearest-feature recovery with a
// row-major tie rule.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "bdreg/grid.hpp"

namespace bdreg {

inline constexpr std::int64_t kNoFeature = std::numeric_limits<std::int64_t>::max();

/// Squared distance from every pixel center to the nearest set pixel center
/// of `features`; kNoFeature everywhere when `features` is empty.
inline Grid<std::int64_t> squared_distance_transform(const RasterMask& features) {
  const int w = features.width(), h = features.height();
  Grid<std::int64_t> out(w, h, kNoFeature);
  if (w == 0 || h == 0) return out;
  const std::int64_t inf = static_cast<std::int64_t>(w) + h + 1;

  Grid<std::int64_t> g(w, h);
  for (int x = 0; x < w; ++x) {
    g(0, x) = features(0, x) ? 0 : inf;
    for (int y = 1; y < h; ++y) g(y, x) = features(y, x) ? 0 : g(y - 1, x) + 1;
    for (int y = h - 2; y >= 0; --y) {
      if (g(y + 1, x) < g(y, x)) g(y, x) = g(y + 1, x) + 1;
    }
  }

  std::vector<int> s(static_cast<std::size_t>(w)), t(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    auto gy = [&](int i) { return g(y, i); };
    auto f = [&](std::int64_t x, int i) { return (x - i) * (x - i) + gy(i) * gy(i); };
    auto sep = [&](std::int64_t i, std::int64_t u) {
      const std::int64_t gu = gy(static_cast<int>(u)), gi = gy(static_cast<int>(i));
      const std::int64_t num = u * u - i * i + gu * gu - gi * gi;
      const std::int64_t den = 2 * (u - i);
      // floor division; num may be negative
      return num >= 0 ? num / den : -((-num + den - 1) / den);
    };
    int q = 0;
    s[0] = 0;
    t[0] = 0;
    for (int u = 1; u < w; ++u) {
      while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const std::int64_t ww = 1 + sep(s[q], u);
        if (ww < w) {
          ++q;
          s[q] = u;
          t[q] = static_cast<int>(ww);
        }
      }
    }
    for (int u = w - 1; u >= 0; --u) {
      const std::int64_t d = f(u, s[q]);
      out(y, u) = gy(s[q]) >= inf ? kNoFeature : d;
      if (u == t[q]) --q;
    }
  }
  return out;
}

struct PixelCoord {
  int row = 0;
  int col = 0;
  friend constexpr bool operator==(PixelCoord, PixelCoord) = default;
};

/// The nearest feature pixel to (row, col) given the exact squared distance
/// field; among equidistant features the first in row-major order wins.
inline std::optional<PixelCoord> nearest_feature(const RasterMask& features,
                                                 const Grid<std::int64_t>& squared, int row,
                                                 int col) {
  const std::int64_t d2 = squared(row, col);
  if (d2 == kNoFeature) return std::nullopt;
  const auto isqrt = [](std::int64_t v) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
  };
  const std::int64_t reach = isqrt(d2);
  for (std::int64_t dy = -reach; dy <= reach; ++dy) {
    const std::int64_t rem = d2 - dy * dy;
    const std::int64_t dx = isqrt(rem);
    if (dx * dx != rem) continue;
    const int r = row + static_cast<int>(dy);
    if (r < 0 || r >= features.height()) continue;
    for (const std::int64_t c64 : {col - dx, col + dx}) {
      const int c = static_cast<int>(c64);
      if (c >= 0 && c < features.width() && features(r, c)) return PixelCoord{r, c};
    }
  }
  return std::nullopt;
}

}  // namespace bdreg
