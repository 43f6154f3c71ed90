#pragma once

// Deterministic synthetic annotation fixtures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bdreg/encoder.hpp"
#include "bdreg/errors.hpp"
#include "bdreg/geometry.hpp"
#include "bdreg/pipeline.hpp"

namespace bdreg::synth {

enum class Family { rect, rotrect, banana, adjacent_pair, nested };

inline constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::rect: return "rect";
    case Family::rotrect: return "rotrect";
    case Family::banana: return "banana";
    case Family::adjacent_pair: return "adjacent-pair";
    case Family::nested: return "nested";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  for (Family f : {Family::rect, Family::rotrect, Family::banana, Family::adjacent_pair,
                   Family::nested}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

/// mt19937_64 with hand-rolled distributions so that sequences do not depend
/// on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int uniform_int(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(eng_() % span);
  }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using SynthImage = AnnotatedImage;

inline constexpr int kImageSide = 256;
inline constexpr double kMargin = 16.0;

/// Upright 14-vertex arc band (7 points per side), the shape of a curved text
/// line annotation.
inline Polygon make_banana(Point center, double radius, double thickness, double span,
                           double rotation) {
  std::vector<Point> v;
  const double cr = std::cos(rotation), sr = std::sin(rotation);
  auto place = [&](double r, double theta) {
    const double lx = r * std::sin(theta), ly = radius - r * std::cos(theta);
    return Point{center.x + cr * lx - sr * ly, center.y + sr * lx + cr * ly};
  };
  for (int i = 0; i < 7; ++i) v.push_back(place(radius + 0.5 * thickness, -0.5 * span + i * span / 6));
  for (int i = 6; i >= 0; --i) v.push_back(place(radius - 0.5 * thickness, -0.5 * span + i * span / 6));
  return Polygon(std::move(v));
}

namespace detail {

struct Box {
  double x0, y0, x1, y1;
};

inline Box bounds(const Polygon& p) {
  Box b{p[0].x, p[0].y, p[0].x, p[0].y};
  for (const Point& q : p.vertices()) {
    b.x0 = std::min(b.x0, q.x), b.y0 = std::min(b.y0, q.y);
    b.x1 = std::max(b.x1, q.x), b.y1 = std::max(b.y1, q.y);
  }
  return b;
}

// Moves `p` to a random position with its bounding box inside the margin.
inline std::optional<Polygon> place_randomly(const Polygon& p, Rng& rng) {
  const Box b = bounds(p);
  const double room_x = kImageSide - 2 * kMargin - (b.x1 - b.x0);
  const double room_y = kImageSide - 2 * kMargin - (b.y1 - b.y0);
  if (room_x < 0 || room_y < 0) return std::nullopt;
  const double nx = kMargin + rng.uniform(0, room_x), ny = kMargin + rng.uniform(0, room_y);
  return translated(p, {nx - b.x0, ny - b.y0});
}

inline std::vector<TextAnnotation> generate(Family f, Rng& rng) {
  switch (f) {
    case Family::rect: {
      const double w = rng.uniform(40, 160), h = rng.uniform(16, 40);
      return {{*place_randomly(make_rectangle(0, 0, w, h), rng), false, 0}};
    }
    case Family::rotrect: {
      const double angle = rng.uniform_int(0, 11) * 15.0 * std::numbers::pi / 180.0;
      const double w = rng.uniform(60, 140), h = rng.uniform(16, 36);
      return {{*place_randomly(make_rotated_rectangle({0, 0}, w, h, angle), rng), false, 0}};
    }
    case Family::banana: {
      for (;;) {
        const double radius = rng.uniform(80, 140), thickness = rng.uniform(18, 32);
        const double span = rng.uniform(50, 100) * std::numbers::pi / 180.0;
        const double rotation = rng.uniform(0, 2 * std::numbers::pi);
        auto placed = place_randomly(make_banana({0, 0}, radius, thickness, span, rotation), rng);
        if (placed) return {{std::move(*placed), false, 0}};
      }
    }
    case Family::adjacent_pair: {
      const double w = rng.uniform(80, 180), h1 = rng.uniform(16, 28), h2 = rng.uniform(16, 28);
      const double gap = rng.uniform(4, 8), shift = rng.uniform(-10, 10);
      const double total = h1 + gap + h2;
      const double x0 = kMargin + 10 + rng.uniform(0, kImageSide - 2 * kMargin - 20 - w);
      const double y0 = kMargin + rng.uniform(0, kImageSide - 2 * kMargin - total);
      return {{make_rectangle(x0, y0, x0 + w, y0 + h1), false, 0},
              {make_rectangle(x0 + shift, y0 + h1 + gap, x0 + shift + w, y0 + total), false, 1}};
    }
    case Family::nested: {
      const double w = rng.uniform(120, 200), h = rng.uniform(60, 100);
      const double iw = rng.uniform(30, 60), ih = rng.uniform(14, 24);
      const Polygon outer = *place_randomly(make_rectangle(0, 0, w, h), rng);
      const Box b = bounds(outer);
      const double ix = b.x0 + 4 + rng.uniform(0, w - 8 - iw);
      const double iy = b.y0 + 4 + rng.uniform(0, h - 8 - ih);
      return {{outer, false, 0}, {make_rectangle(ix, iy, ix + iw, iy + ih), false, 1}};
    }
  }
  throw ParameterError("unknown fixture family");
}

}  // namespace detail

/// `count` images of family `f`; image i depends only on (seed, i).
inline std::vector<SynthImage> synthesize(Family f, int count, std::uint64_t seed) {
  if (count < 0) throw ParameterError("fixture count must be non-negative");
  std::vector<SynthImage> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    char name[32];
    std::snprintf(name, sizeof(name), "img_%04d", i);
    out.push_back({name, kImageSide, kImageSide, detail::generate(f, rng)});
  }
  return out;
}

}  // namespace bdreg::synth
