#pragma once

// Label generation: converts polygon annotations into the dense training
// targets (text region, text kernel, pixel offset, pixel orientation).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <string_view>
#include <vector>

#include "bdreg/distance_transform.hpp"
#include "bdreg/errors.hpp"
#include "bdreg/geometry.hpp"
#include "bdreg/grid.hpp"

namespace bdreg {

/// Which instance expression the maps encode.
enum class Expression : std::uint8_t {
  /// Offsets and orientations on the border band between kernel and the
  /// expanded region, regressed from both sides of the boundary.
  bidirectional = 0,
  /// Offsets on the shrunk central region only; no expansion, no orientation.
  msr = 1,
};

inline std::string_view to_string(Expression e) {
  return e == Expression::msr ? "msr" : "bidir";
}

struct TextAnnotation {
  Polygon polygon;
  bool ignore = false;  // "do not care": excluded from loss and evaluation
  int id = 0;
};

struct EncoderConfig {
  double alpha = 0.6;  // shrink ratio of the kernel
  double beta = 1.2;   // expansion ratio of the text region
  Expression mode = Expression::bidirectional;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      std::ostringstream os;
      os << "alpha must be in (0, 1], got " << alpha;
      throw ParameterError(os.str());
    }
    if (!(beta >= 1.0) || !std::isfinite(beta)) {
      std::ostringstream os;
      os << "beta must be >= 1, got " << beta;
      throw ParameterError(os.str());
    }
  }
};

inline constexpr std::int32_t kBackground = -1;
inline constexpr std::int32_t kIgnoreRegion = -2;

/// Dense targets for one image. `train_mask` is 1 where a pixel takes part in
/// the loss and 0 where it is excluded (ignore regions).
struct LabelMaps {
  RasterMask text_region;
  RasterMask text_kernel;
  VectorField offset;       // px, toward the nearest point of the annotated boundary
  VectorField orientation;  // unit vector toward the nearest own kernel pixel
  LabelMap instance_id;     // annotation id, kBackground or kIgnoreRegion
  RasterMask train_mask;
  Expression mode = Expression::bidirectional;

  LabelMaps() = default;
  LabelMaps(int width, int height, Expression m)
      : text_region(width, height),
        text_kernel(width, height),
        offset(width, height),
        orientation(width, height),
        instance_id(width, height, kBackground),
        train_mask(width, height, 1),
        mode(m) {}

  int width() const noexcept { return text_region.width(); }
  int height() const noexcept { return text_region.height(); }

  /// Pixels carrying offset labels: the border band (bidirectional) or the
  /// kernel (msr), restricted to the train mask.
  RasterMask regression_mask() const {
    RasterMask m(width(), height());
    for (std::size_t i = 0; i < m.size(); ++i) {
      const bool band = mode == Expression::msr ? text_kernel[i] != 0
                                                : (text_region[i] != 0 && text_kernel[i] == 0);
      m[i] = band && train_mask[i] != 0;
    }
    return m;
  }

  friend bool operator==(const LabelMaps&, const LabelMaps&) = default;
};

namespace detail {

struct PreparedInstance {
  const TextAnnotation* ann = nullptr;
  double area = 0.0;
  bool ignore = false;
  RasterMask region;
  RasterMask kernel;
};

inline Point pixel_center(int row, int col) { return {col + 0.5, row + 0.5}; }

// Shrinks by d; if the kernel rasterizes empty, halves d while it stays at or
// above 0.5 px. Returns an empty mask when every attempt fails.
inline RasterMask rasterized_kernel(const Polygon& p, double d, int width, int height) {
  for (double step = d;; step *= 0.5) {
    RasterMask m = rasterize(offset_polygon(p, -step), width, height);
    if (count_set(m) > 0) return m;
    if (step * 0.5 < 0.5) break;
  }
  return RasterMask(width, height);
}

inline void check_annotations(const std::vector<TextAnnotation>& anns) {
  std::set<int> ids;
  for (const auto& a : anns) {
    if (a.id < 0) throw ParameterError("annotation id must be non-negative");
    if (!ids.insert(a.id).second) {
      std::ostringstream os;
      os << "duplicate annotation id " << a.id;
      throw ParameterError(os.str());
    }
  }
}

}  // namespace detail

/// Encodes `annotations` into label maps at `width` x `height`. The mode in
/// `cfg` selects the bidirectional or the msr expression. Where instances
/// overlap, the one with the smaller polygon area owns the pixel.
inline LabelMaps encode(const std::vector<TextAnnotation>& annotations, int width, int height,
                        const EncoderConfig& cfg) {
  cfg.validate();
  if (width <= 0 || height <= 0) throw ParameterError("image dimensions must be positive");
  detail::check_annotations(annotations);
  const bool msr = cfg.mode == Expression::msr;

  std::vector<detail::PreparedInstance> inst;
  inst.reserve(annotations.size());
  for (const auto& ann : annotations) {
    detail::PreparedInstance pi;
    pi.ann = &ann;
    pi.area = polygon_area(ann.polygon);
    pi.ignore = ann.ignore;
    const double grow = msr ? 0.0 : expand_offset(ann.polygon, cfg.beta);
    pi.region = rasterize(offset_polygon(ann.polygon, grow), width, height);
    if (!pi.ignore) {
      pi.kernel =
          detail::rasterized_kernel(ann.polygon, shrink_offset(ann.polygon, cfg.alpha), width, height);
      if (count_set(pi.kernel) == 0) pi.ignore = true;
    }
    inst.push_back(std::move(pi));
  }

  // Paint large to small so that smaller instances win shared pixels.
  std::vector<std::size_t> order(inst.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (inst[a].area != inst[b].area) return inst[a].area > inst[b].area;
    return inst[a].ann->id > inst[b].ann->id;
  });
  LabelMap owner(width, height, -1);
  for (std::size_t k : order) {
    const auto& region = inst[k].region;
    for (std::size_t i = 0; i < owner.size(); ++i) {
      if (region[i]) owner[i] = static_cast<std::int32_t>(k);
    }
  }

  // An instance whose kernel was fully claimed by smaller ones cannot be
  // grouped at decode time; it is demoted to an ignore region.
  std::vector<std::uint8_t> has_kernel(inst.size(), 0);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    const int k = owner[i];
    if (k >= 0 && !inst[static_cast<std::size_t>(k)].ignore &&
        inst[static_cast<std::size_t>(k)].kernel[i]) {
      has_kernel[static_cast<std::size_t>(k)] = 1;
    }
  }

  LabelMaps maps(width, height, cfg.mode);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    const int k = owner[i];
    if (k < 0) continue;
    const auto& pi = inst[static_cast<std::size_t>(k)];
    if (pi.ignore || !has_kernel[static_cast<std::size_t>(k)]) {
      maps.instance_id[i] = kIgnoreRegion;
      maps.train_mask[i] = 0;
      continue;
    }
    maps.instance_id[i] = pi.ann->id;
    maps.text_region[i] = 1;
    maps.text_kernel[i] = pi.kernel[i] ? 1 : 0;
  }

  for (std::size_t k = 0; k < inst.size(); ++k) {
    if (inst[k].ignore || !has_kernel[k]) continue;
    const Polygon& poly = inst[k].ann->polygon;
    const int id = inst[k].ann->id;

    int r0 = height, r1 = -1, c0 = width, c1 = -1;
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        if (maps.instance_id(r, c) != id) continue;
        r0 = std::min(r0, r), r1 = std::max(r1, r);
        c0 = std::min(c0, c), c1 = std::max(c1, c);
      }
    }
    if (r1 < 0) continue;

    // Kernel of this instance inside its bounding box, for the exact
    // nearest-kernel-pixel query.
    const int bw = c1 - c0 + 1, bh = r1 - r0 + 1;
    RasterMask local(bw, bh);
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        local(r - r0, c - c0) = maps.instance_id(r, c) == id && maps.text_kernel(r, c);
      }
    }
    const auto sq = msr ? Grid<std::int64_t>() : squared_distance_transform(local);

    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        if (maps.instance_id(r, c) != id) continue;
        const bool in_kernel = maps.text_kernel(r, c) != 0;
        if (msr != in_kernel) continue;
        const Point center = detail::pixel_center(r, c);
        const Point off = nearest_boundary_point(poly, center).point - center;
        maps.offset.x(r, c) = static_cast<float>(off.x);
        maps.offset.y(r, c) = static_cast<float>(off.y);
        if (msr) continue;
        const auto nk = nearest_feature(local, sq, r - r0, c - c0);
        if (!nk) continue;
        const Point dir{static_cast<double>(nk->col - (c - c0)),
                        static_cast<double>(nk->row - (r - r0))};
        const double len = norm(dir);
        maps.orientation.x(r, c) = static_cast<float>(dir.x / len);
        maps.orientation.y(r, c) = static_cast<float>(dir.y / len);
      }
    }
  }
  return maps;
}

/// Encodes with the msr expression regardless of `cfg.mode`.
inline LabelMaps encode_msr(const std::vector<TextAnnotation>& annotations, int width,
                            int height, EncoderConfig cfg) {
  cfg.mode = Expression::msr;
  return encode(annotations, width, height, cfg);
}

}  // namespace bdreg
