#pragma once

// Post-processing: rebuilds one polygon per text instance from the four
// predicted maps.
//
//   binarize -> kernel components -> orientation-gated border grouping
//            -> shift grouped pixels by their offsets -> alpha-shape hull

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "bdreg/alpha_shape.hpp"
#include "bdreg/components.hpp"
#include "bdreg/distance_transform.hpp"
#include "bdreg/encoder.hpp"
#include "bdreg/geometry.hpp"
#include "bdreg/grid.hpp"

namespace bdreg {

struct DecoderConfig {
  double gamma = 3.0;  // distance gate to the nearest kernel pixel
  double epsilon = 0.9063077870366499;  // cos(25 deg), orientation gate
  std::size_t min_kernel_area = 16;
  double binarize_region = 0.5;
  double binarize_kernel = 0.5;
  double alpha_radius_scale = 2.0;  // x median nearest-neighbour spacing
  Connectivity connectivity = Connectivity::eight;
  // gamma is expressed in units of the network's output stride; the distance
  // gate at full resolution is gamma * distance_scale pixels.
  double distance_scale = 4.0;

  double distance_gate() const noexcept { return gamma * distance_scale; }

  void validate() const {
    auto fail = [](const char* what, double v) {
      std::ostringstream os;
      os << what << " (got " << v << ")";
      throw ParameterError(os.str());
    };
    if (!(gamma > 0.0)) fail("gamma must be positive", gamma);
    if (!(epsilon >= -1.0 && epsilon <= 1.0)) fail("epsilon must be in [-1, 1]", epsilon);
    if (!(binarize_region >= 0.0 && binarize_region <= 1.0)) {
      fail("binarize_region must be in [0, 1]", binarize_region);
    }
    if (!(binarize_kernel >= 0.0 && binarize_kernel <= 1.0)) {
      fail("binarize_kernel must be in [0, 1]", binarize_kernel);
    }
    if (!(alpha_radius_scale > 0.0)) fail("alpha_radius_scale must be positive", alpha_radius_scale);
    if (!(distance_scale > 0.0)) fail("distance_scale must be positive", distance_scale);
  }
};

/// Network-style predictions: probabilities for the two masks, raw vectors
/// for offset and orientation.
struct ScoreMaps {
  FloatMap text_region;
  FloatMap text_kernel;
  VectorField offset;
  VectorField orientation;

  ScoreMaps() = default;
  ScoreMaps(int width, int height)
      : text_region(width, height),
        text_kernel(width, height),
        offset(width, height),
        orientation(width, height) {}

  int width() const noexcept { return text_region.width(); }
  int height() const noexcept { return text_region.height(); }

  void validate() const {
    require_same_shape(text_region, text_kernel, "text_kernel");
    require_same_shape(text_region, offset.x, "offset.x");
    require_same_shape(text_region, offset.y, "offset.y");
    require_same_shape(text_region, orientation.x, "orientation.x");
    require_same_shape(text_region, orientation.y, "orientation.y");
  }

  friend bool operator==(const ScoreMaps&, const ScoreMaps&) = default;
};

/// The predictions a perfect network would make for `labels`.
inline ScoreMaps perfect_scores(const LabelMaps& labels) {
  ScoreMaps s(labels.width(), labels.height());
  for (std::size_t i = 0; i < s.text_region.size(); ++i) {
    s.text_region[i] = labels.text_region[i] ? 1.0f : 0.0f;
    s.text_kernel[i] = labels.text_kernel[i] ? 1.0f : 0.0f;
  }
  s.offset = labels.offset;
  s.orientation = labels.orientation;
  return s;
}

struct DecodedInstance {
  Polygon polygon;
  int kernel_id = 0;
  double score = 0.0;
};

struct BorderGroups {
  LabelMap group;  // kernel id for grouped border pixels, -1 elsewhere
  RasterMask border;
  std::size_t border_count = 0;
  std::size_t grouped_count = 0;
};

struct BinarizedMaps {
  RasterMask region;
  RasterMask kernel;  // kernel prediction gated by the region prediction
};

inline BinarizedMaps binarize(const ScoreMaps& maps, const DecoderConfig& cfg) {
  BinarizedMaps b{RasterMask(maps.width(), maps.height()),
                  RasterMask(maps.width(), maps.height())};
  for (std::size_t i = 0; i < b.region.size(); ++i) {
    b.region[i] = maps.text_region[i] > cfg.binarize_region;
    b.kernel[i] = b.region[i] && maps.text_kernel[i] > cfg.binarize_kernel;
  }
  return b;
}

/// Connected components of the binarized kernel, small ones dropped.
inline Components kernel_components(const ScoreMaps& maps, const DecoderConfig& cfg) {
  return connected_components(binarize(maps, cfg).kernel, cfg.connectivity, cfg.min_kernel_area);
}

/// Assigns each border pixel (region and not kernel) to the component of its
/// nearest kernel pixel p_k, provided |p_i p_k| < gamma * distance_scale and
/// the unit vector p_i -> p_k agrees with the predicted orientation by more
/// than epsilon. Other border pixels are deserted.
inline BorderGroups group_border_pixels(const ScoreMaps& maps, const Components& kernels,
                                        const DecoderConfig& cfg) {
  maps.validate();
  require_same_shape(maps.text_region, kernels.labels, "kernel labels");
  const BinarizedMaps bin = binarize(maps, cfg);
  const int w = maps.width(), h = maps.height();
  BorderGroups out{LabelMap(w, h, -1), RasterMask(w, h), 0, 0};

  RasterMask kernel_pixels(w, h);
  for (std::size_t i = 0; i < kernel_pixels.size(); ++i) kernel_pixels[i] = kernels.labels[i] >= 0;
  const auto sq = squared_distance_transform(kernel_pixels);
  const double gate = cfg.distance_gate();

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!bin.region(r, c) || bin.kernel(r, c)) continue;
      out.border(r, c) = 1;
      ++out.border_count;
      const auto nk = nearest_feature(kernel_pixels, sq, r, c);
      if (!nk) continue;
      const double dist = std::sqrt(static_cast<double>(sq(r, c)));
      if (!(dist < gate)) continue;
      const double ox = maps.orientation.x(r, c), oy = maps.orientation.y(r, c);
      const double olen = std::hypot(ox, oy);
      if (!(olen > 0.0)) continue;
      const double cosine = ((nk->col - c) * ox + (nk->row - r) * oy) / (dist * olen);
      if (!(cosine > cfg.epsilon)) continue;
      out.group(r, c) = kernels.labels(nk->row, nk->col);
      ++out.grouped_count;
    }
  }
  return out;
}

/// Pixel centers of each group moved by their offset vectors, clamped to the
/// image rectangle. Pixels are visited in row-major order.
inline std::vector<std::vector<Point>> shift_points(const LabelMap& groups, int group_count,
                                                    const VectorField& offset) {
  require_same_shape(groups, offset.x, "offset.x");
  require_same_shape(groups, offset.y, "offset.y");
  std::vector<std::vector<Point>> out(static_cast<std::size_t>(std::max(group_count, 0)));
  const double w = groups.width(), h = groups.height();
  for (int r = 0; r < groups.height(); ++r) {
    for (int c = 0; c < groups.width(); ++c) {
      const int g = groups(r, c);
      if (g < 0 || g >= group_count) continue;
      const double x = c + 0.5 + static_cast<double>(offset.x(r, c));
      const double y = r + 0.5 + static_cast<double>(offset.y(r, c));
      out[static_cast<std::size_t>(g)].push_back(
          {std::clamp(std::isfinite(x) ? x : c + 0.5, 0.0, w),
           std::clamp(std::isfinite(y) ? y : r + 0.5, 0.0, h)});
    }
  }
  return out;
}

/// Alpha-shape radius for one group of shifted points: the largest of
/// `scale` x median nearest-neighbour spacing, the smallest radius joining all
/// points into one component, and `half_thickness` + 1 px. The last term keeps
/// the hull solid: points sampled along a straight boundary form slivers with
/// tiny circumradii that can connect everything without covering the inside.
inline double hull_radius(const AlphaComplex& complex, double scale, double half_thickness = 0.0) {
  auto nn = complex.triangulation().nearest_neighbor_distances();
  std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2), nn.end());
  const double median = nn[nn.size() / 2];
  return std::max({scale * median, complex.connecting_radius(), half_thickness + 1.0});
}

/// Hull of one group of shifted points, or nothing when fewer than three
/// usable points remain.
inline std::optional<Polygon> reconstruct_outline(const std::vector<Point>& points,
                                                  const DecoderConfig& cfg,
                                                  double half_thickness = 0.0) {
  if (points.size() < 3) return std::nullopt;
  try {
    const AlphaComplex complex(points);
    const double radius = hull_radius(complex, cfg.alpha_radius_scale, half_thickness);
    auto comps = complex.components(radius);
    if (comps.empty()) return complex.convex_hull();
    return std::move(comps.front().outline);
  } catch (const DegenerateGeometryError&) {
    return std::nullopt;
  }
}

namespace detail {

// Half-thickness of each instance: the larger of the deepest pixel of its
// support (kernel component plus grouped border pixels) and the longest
// offset among its shifted pixels.
inline std::vector<double> half_thickness(const Components& kernels, const LabelMap& groups,
                                          const LabelMap& shifted, const VectorField& offset) {
  const int w = kernels.labels.width(), h = kernels.labels.height();
  const auto n = static_cast<std::size_t>(kernels.count);
  std::vector<double> out(n, 0.0);
  std::vector<int> r0(n, h), r1(n, -1), c0(n, w), c1(n, -1);
  auto owner = [&](std::size_t i) { return kernels.labels[i] >= 0 ? kernels.labels[i] : groups[i]; };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = kernels.labels.index(r, c);
      if (const int s = shifted[i]; s >= 0) {
        const double len = std::hypot(offset.x[i], offset.y[i]);
        if (std::isfinite(len)) out[static_cast<std::size_t>(s)] = std::max(out[static_cast<std::size_t>(s)], len);
      }
      const int g = owner(i);
      if (g < 0) continue;
      const auto k = static_cast<std::size_t>(g);
      r0[k] = std::min(r0[k], r), r1[k] = std::max(r1[k], r);
      c0[k] = std::min(c0[k], c), c1[k] = std::max(c1[k], c);
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (r1[k] < 0) continue;
    // One pixel of padding so the box edge counts as outside.
    const int bw = c1[k] - c0[k] + 3, bh = r1[k] - r0[k] + 3;
    RasterMask outside(bw, bh, 1);
    for (int r = r0[k]; r <= r1[k]; ++r) {
      for (int c = c0[k]; c <= c1[k]; ++c) {
        if (owner(kernels.labels.index(r, c)) == static_cast<int>(k)) outside(r - r0[k] + 1, c - c0[k] + 1) = 0;
      }
    }
    const auto sq = squared_distance_transform(outside);
    std::int64_t deepest = 0;
    for (std::size_t i = 0; i < sq.size(); ++i) {
      if (!outside[i]) deepest = std::max(deepest, sq[i]);
    }
    out[k] = std::max(out[k], std::sqrt(static_cast<double>(deepest)));
  }
  return out;
}

inline std::vector<DecodedInstance> assemble(const ScoreMaps& maps, const Components& kernels,
                                             const LabelMap& groups, const LabelMap& shifted,
                                             const std::vector<std::vector<Point>>& points,
                                             const DecoderConfig& cfg) {
  std::vector<double> prob_sum(static_cast<std::size_t>(kernels.count), 0.0);
  std::vector<std::size_t> prob_n(static_cast<std::size_t>(kernels.count), 0);
  for (std::size_t i = 0; i < kernels.labels.size(); ++i) {
    int g = kernels.labels[i];
    if (g < 0) g = groups[i];
    if (g < 0) continue;
    prob_sum[static_cast<std::size_t>(g)] += maps.text_region[i];
    ++prob_n[static_cast<std::size_t>(g)];
  }
  const auto thickness = half_thickness(kernels, groups, shifted, maps.offset);
  std::vector<DecodedInstance> out;
  for (int k = 0; k < kernels.count; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    auto outline = reconstruct_outline(points[ku], cfg, thickness[ku]);
    if (!outline) continue;
    const auto n = prob_n[ku];
    out.push_back({std::move(*outline), k, n ? prob_sum[ku] / static_cast<double>(n) : 0.0});
  }
  return out;
}

}  // namespace detail

/// Full bidirectional post-processing. Instances are returned in kernel-id
/// order; groups that yield no valid polygon are dropped.
inline std::vector<DecodedInstance> decode(const ScoreMaps& maps, const DecoderConfig& cfg) {
  cfg.validate();
  maps.validate();
  if (maps.width() == 0 || maps.height() == 0) return {};
  const Components kernels = kernel_components(maps, cfg);
  if (kernels.count == 0) return {};
  const BorderGroups groups = group_border_pixels(maps, kernels, cfg);
  const auto points = shift_points(groups.group, kernels.count, maps.offset);
  return detail::assemble(maps, kernels, groups.group, groups.group, points, cfg);
}

/// Central-region post-processing: every kernel pixel is shifted by its
/// offset and hulled per component, without orientation or distance gating.
inline std::vector<DecodedInstance> decode_msr(const ScoreMaps& maps, const DecoderConfig& cfg) {
  cfg.validate();
  maps.validate();
  if (maps.width() == 0 || maps.height() == 0) return {};
  const Components kernels = kernel_components(maps, cfg);
  if (kernels.count == 0) return {};
  const auto points = shift_points(kernels.labels, kernels.count, maps.offset);
  const LabelMap none(maps.width(), maps.height(), -1);
  return detail::assemble(maps, kernels, none, kernels.labels, points, cfg);
}

/// Dispatches on the expression.
inline std::vector<DecodedInstance> decode(const ScoreMaps& maps, const DecoderConfig& cfg,
                                           Expression mode) {
  return mode == Expression::msr ? decode_msr(maps, cfg) : decode(maps, cfg);
}

}  // namespace bdreg
