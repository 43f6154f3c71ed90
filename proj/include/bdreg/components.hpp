#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bdreg/grid.hpp"

namespace bdreg {

enum class Connectivity { four = 4, eight = 8 };

struct Components {
  LabelMap labels;  // -1 background, otherwise 0..count-1
  int count = 0;
};

/// Labels connected foreground regions in first-encounter (row-major) order.
/// Components with fewer than `min_area` pixels are cleared to background and
/// the remaining labels are compacted, preserving their order.
inline Components connected_components(const RasterMask& mask, Connectivity conn,
                                       std::size_t min_area = 0) {
  const int w = mask.width(), h = mask.height();
  Components out{LabelMap(w, h, -1), 0};
  std::vector<std::size_t> sizes;
  std::vector<std::pair<int, int>> stack;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask(r, c) || out.labels(r, c) >= 0) continue;
      const int id = static_cast<int>(sizes.size());
      std::size_t n = 0;
      out.labels(r, c) = id;
      stack.assign(1, {r, c});
      while (!stack.empty()) {
        auto [y, x] = stack.back();
        stack.pop_back();
        ++n;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (conn == Connectivity::four && dx != 0 && dy != 0) continue;
            const int ny = y + dy, nx = x + dx;
            if (!mask.contains(ny, nx) || !mask(ny, nx) || out.labels(ny, nx) >= 0) continue;
            out.labels(ny, nx) = id;
            stack.push_back({ny, nx});
          }
        }
      }
      sizes.push_back(n);
    }
  }
  std::vector<int> remap(sizes.size(), -1);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] >= min_area) remap[i] = out.count++;
  }
  for (auto& v : out.labels.values()) {
    if (v >= 0) v = remap[static_cast<std::size_t>(v)];
  }
  return out;
}

}  // namespace bdreg
