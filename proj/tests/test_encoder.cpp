#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bdreg/encoder.hpp"
#include "bdreg/synth.hpp"

using namespace bdreg;

namespace {

struct Rect {
  double x0, y0, x1, y1;
};

// Euclidean distance from q to an axis-aligned rectangle (0 inside).
double outside_distance(const Rect& r, Point q) {
  const double dx = std::max({r.x0 - q.x, 0.0, q.x - r.x1});
  const double dy = std::max({r.y0 - q.y, 0.0, q.y - r.y1});
  return std::hypot(dx, dy);
}

// Nearest point on the rectangle outline.
Point nearest_on_outline(const Rect& r, Point q) {
  const bool inside = q.x > r.x0 && q.x < r.x1 && q.y > r.y0 && q.y < r.y1;
  if (!inside) return {std::clamp(q.x, r.x0, r.x1), std::clamp(q.y, r.y0, r.y1)};
  const double dl = q.x - r.x0, dr = r.x1 - q.x, dt = q.y - r.y0, db = r.y1 - q.y;
  const double m = std::min({dl, dr, dt, db});
  if (m == dl) return {r.x0, q.y};
  if (m == dr) return {r.x1, q.y};
  if (m == dt) return {q.x, r.y0};
  return {q.x, r.y1};
}

const Rect kRect{44, 54, 84, 74};  // 40 x 20, centered in 128 x 128

std::vector<TextAnnotation> one_rect(const Rect& r = kRect) {
  return {{make_rectangle(r.x0, r.y0, r.x1, r.y1), false, 0}};
}

}  // namespace

TEST(Encoder, RectangleKernelMatchesAnalyticInset) {
  const auto maps = encode(one_rect(), 128, 128, {});
  const double d = 800 * (1 - 0.36) / 120;
  ASSERT_NEAR(d, 4.2667, 1e-4);
  for (int r = 0; r < 128; ++r) {
    for (int c = 0; c < 128; ++c) {
      const double x = c + 0.5, y = r + 0.5;
      const bool want = x > kRect.x0 + d && x < kRect.x1 - d && y > kRect.y0 + d && y < kRect.y1 - d;
      ASSERT_EQ(maps.text_kernel(r, c) != 0, want) << r << "," << c;
    }
  }
}

TEST(Encoder, RectangleRegionMatchesAnalyticOutset) {
  const auto maps = encode(one_rect(), 128, 128, {});
  const double de = 800 * (1.44 - 1) / 120;
  for (int r = 0; r < 128; ++r) {
    for (int c = 0; c < 128; ++c) {
      const double dist = outside_distance(kRect, {c + 0.5, r + 0.5});
      // Round corners are polygonized with a 0.25 px tolerance.
      if (std::abs(dist - de) < 0.25) continue;
      ASSERT_EQ(maps.text_region(r, c) != 0, dist < de) << r << "," << c;
    }
  }
}

TEST(Encoder, BorderOffsetsLandOnTheOutline) {
  const auto maps = encode(one_rect(), 128, 128, {});
  std::size_t border = 0;
  for (int r = 0; r < 128; ++r) {
    for (int c = 0; c < 128; ++c) {
      const Point center{c + 0.5, r + 0.5};
      const Point off{maps.offset.x(r, c), maps.offset.y(r, c)};
      if (!maps.text_region(r, c) || maps.text_kernel(r, c)) {
        EXPECT_EQ(off, (Point{0, 0}));
        continue;
      }
      ++border;
      const Point landed = center + off;
      // Landed point lies on the outline, and no outline point is closer.
      const double on_outline = distance(landed, nearest_on_outline(kRect, landed));
      EXPECT_LT(on_outline, 0.8);
      EXPECT_LT(on_outline, 1e-4);
      EXPECT_NEAR(norm(off), distance(center, nearest_on_outline(kRect, center)), 1e-4);
    }
  }
  EXPECT_GT(border, 0u);
}

TEST(Encoder, OrientationPointsAtNearestKernelPixel) {
  const auto maps = encode(one_rect(), 128, 128, {});
  for (int r = 0; r < 128; ++r) {
    for (int c = 0; c < 128; ++c) {
      if (!maps.text_region(r, c) || maps.text_kernel(r, c)) continue;
      double best = INFINITY;
      for (int kr = 0; kr < 128; ++kr) {
        for (int kc = 0; kc < 128; ++kc) {
          if (maps.text_kernel(kr, kc)) best = std::min(best, std::hypot(kr - r, kc - c));
        }
      }
      const Point o{maps.orientation.x(r, c), maps.orientation.y(r, c)};
      ASSERT_NEAR(norm(o), 1.0, 1e-6);
      const double tx = c + o.x * best, ty = r + o.y * best;
      const int kc = static_cast<int>(std::lround(tx)), kr = static_cast<int>(std::lround(ty));
      ASSERT_NEAR(tx, kc, 1e-4);
      ASSERT_NEAR(ty, kr, 1e-4);
      ASSERT_TRUE(maps.text_kernel(kr, kc));
    }
  }
}

TEST(Encoder, UnitRatiosCollapseTheBorder) {
  EncoderConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 1.0;
  const auto maps = encode(one_rect(), 128, 128, cfg);
  const auto raster = rasterize(make_rectangle(kRect.x0, kRect.y0, kRect.x1, kRect.y1), 128, 128);
  EXPECT_EQ(maps.text_region, raster);
  EXPECT_EQ(maps.text_kernel, raster);
  for (float v : maps.offset.x.values()) EXPECT_EQ(v, 0.0f);
  for (float v : maps.offset.y.values()) EXPECT_EQ(v, 0.0f);
  for (float v : maps.orientation.x.values()) EXPECT_EQ(v, 0.0f);
  for (float v : maps.orientation.y.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Encoder, SmallerInstanceWinsOverlap) {
  const std::vector<TextAnnotation> anns{{make_rectangle(10, 10, 110, 90), false, 0},
                                         {make_rectangle(40, 40, 70, 56), false, 1}};
  const auto maps = encode(anns, 128, 128, {});
  const auto small = rasterize(anns[1].polygon, 128, 128);
  for (std::size_t i = 0; i < small.size(); ++i) {
    if (small[i]) {
      EXPECT_EQ(maps.instance_id[i], 1);
    }
  }
  EXPECT_EQ(maps.instance_id(20, 20), 0);
}

TEST(Encoder, MsrCenterOffsetIsDistanceToNearestEdge) {
  // 40 x 20 rectangle whose center (63.5, 63.5) is a pixel center.
  const Rect r{43.5, 53.5, 83.5, 73.5};
  const auto maps = encode_msr(one_rect(r), 128, 128, {});
  EXPECT_EQ(maps.mode, Expression::msr);
  ASSERT_TRUE(maps.text_kernel(63, 63));
  EXPECT_NEAR(std::hypot(maps.offset.x(63, 63), maps.offset.y(63, 63)), 10.0, 1e-6);
  for (std::size_t i = 0; i < maps.text_region.size(); ++i) {
    // No expansion in msr, and offsets live on kernel pixels only.
    if (!maps.text_kernel[i]) {
      EXPECT_EQ(maps.offset.x[i], 0.0f);
      EXPECT_EQ(maps.offset.y[i], 0.0f);
    }
    EXPECT_EQ(maps.orientation.x[i], 0.0f);
  }
  EXPECT_EQ(maps.text_region, rasterize(make_rectangle(r.x0, r.y0, r.x1, r.y1), 128, 128));
}

TEST(Encoder, EmptyAnnotationList) {
  const auto maps = encode({}, 32, 16, {});
  EXPECT_EQ(count_set(maps.text_region), 0u);
  EXPECT_EQ(count_set(maps.text_kernel), 0u);
  EXPECT_EQ(count_set(maps.train_mask), maps.train_mask.size());
  for (auto id : maps.instance_id.values()) EXPECT_EQ(id, kBackground);
}

TEST(Encoder, IgnoreOnlyAnnotation) {
  const std::vector<TextAnnotation> anns{{make_rectangle(10, 10, 50, 30), true, 0}};
  const auto maps = encode(anns, 64, 64, {});
  EXPECT_EQ(count_set(maps.text_region), 0u);
  EXPECT_EQ(count_set(maps.text_kernel), 0u);
  EXPECT_TRUE(std::all_of(maps.offset.x.values().begin(), maps.offset.x.values().end(),
                          [](float v) { return v == 0.0f; }));
  EXPECT_EQ(maps.train_mask(20, 30), 0);
  EXPECT_EQ(maps.instance_id(20, 30), kIgnoreRegion);
  EXPECT_EQ(maps.train_mask(50, 5), 1);
}

TEST(Encoder, ThinInstanceFallsBackToHalfShrink) {
  // alpha 0.1: d = 1.90 leaves the strip y in (10.90, 11.10), between pixel
  // centers; d / 2 = 0.95 covers rows 10 and 11.
  const auto p = make_rectangle(10, 9, 110, 13);
  EncoderConfig cfg;
  cfg.alpha = 0.1;
  const double d = shrink_offset(p, cfg.alpha);
  ASSERT_EQ(count_set(rasterize(offset_polygon(p, -d), 128, 32)), 0u);
  const auto maps = encode({{p, false, 0}}, 128, 32, cfg);
  EXPECT_GT(count_set(maps.text_kernel), 0u);
  EXPECT_EQ(maps.text_kernel, rasterize(offset_polygon(p, -d / 2), 128, 32));
}

TEST(Encoder, VanishingKernelBecomesIgnore) {
  // d = 0.25 leaves y in (10.85, 11.15); halving would go below 0.5 px.
  const auto p = make_rectangle(10, 10.6, 40, 11.4);
  const auto maps = encode({{p, false, 0}}, 64, 32, {});
  EXPECT_EQ(count_set(maps.text_kernel), 0u);
  EXPECT_EQ(count_set(maps.text_region), 0u);
  EXPECT_EQ(maps.instance_id(10, 20), kIgnoreRegion);
  EXPECT_EQ(maps.train_mask(10, 20), 0);
  EXPECT_EQ(maps.train_mask(20, 20), 1);
}

TEST(Encoder, RejectsBadConfigAndIds) {
  EncoderConfig cfg;
  cfg.alpha = 0.0;
  try {
    encode({}, 8, 8, cfg);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
  cfg = {};
  cfg.beta = 0.5;
  try {
    encode({}, 8, 8, cfg);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("beta"), std::string::npos);
  }
  const std::vector<TextAnnotation> dup{{make_rectangle(0, 0, 4, 4), false, 3},
                                        {make_rectangle(5, 5, 9, 9), false, 3}};
  EXPECT_THROW(encode(dup, 16, 16, {}), ParameterError);
  EXPECT_THROW(encode({}, 0, 16, {}), ParameterError);
}

TEST(EncoderProperties, InvariantsOnSyntheticFixtures) {
  for (auto family : {synth::Family::rotrect, synth::Family::banana, synth::Family::nested,
                      synth::Family::adjacent_pair}) {
    for (const auto& img : synth::synthesize(family, 8, 3)) {
      for (auto mode : {Expression::bidirectional, Expression::msr}) {
        EncoderConfig cfg;
        cfg.mode = mode;
        const auto maps = encode(img.annotations, img.width, img.height, cfg);
        EXPECT_EQ(maps, encode(img.annotations, img.width, img.height, cfg));  // deterministic
        for (std::size_t i = 0; i < maps.text_region.size(); ++i) {
          ASSERT_LE(maps.text_kernel[i], maps.text_region[i]);
          ASSERT_EQ(maps.text_region[i] != 0, maps.instance_id[i] >= 0);
          ASSERT_EQ(maps.train_mask[i] == 0, maps.instance_id[i] == kIgnoreRegion);
          const bool band = mode == Expression::msr ? maps.text_kernel[i] != 0
                                                    : maps.text_region[i] && !maps.text_kernel[i];
          if (band && mode == Expression::bidirectional) {
            ASSERT_NEAR(std::hypot(maps.orientation.x[i], maps.orientation.y[i]), 1.0, 1e-6);
          }
          if (!band) {
            ASSERT_EQ(maps.offset.x[i], 0.0f);
          }
        }
      }
    }
  }
}
