#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bdreg/geometry.hpp"
#include "support.hpp"

using namespace bdreg;

namespace {

Polygon unit_triangle() { return Polygon({{0, 0}, {1, 0}, {0, 1}}); }

}  // namespace

TEST(Area, SquareAndTriangle) {
  EXPECT_DOUBLE_EQ(polygon_area(make_rectangle(0, 0, 10, 10)), 100.0);
  EXPECT_DOUBLE_EQ(polygon_area(unit_triangle()), 0.5);
}

TEST(Area, FourteenGonNearCircle) {
  // 14-gon whose edges touch the circle: area n r^2 tan(pi / n), 1.7% above pi r^2.
  const double r = 20.0, n = 14;
  const double rv = r / std::cos(std::numbers::pi / n);
  std::vector<Point> v;
  for (int i = 0; i < 14; ++i) {
    const double a = 2 * std::numbers::pi * i / n;
    v.push_back({rv * std::cos(a), rv * std::sin(a)});
  }
  const double disk = std::numbers::pi * r * r;
  EXPECT_NEAR(polygon_area(Polygon(v)), disk, 0.02 * disk);
  EXPECT_NEAR(polygon_area(Polygon(v)), n * r * r * std::tan(std::numbers::pi / n), 1e-9);
}

TEST(Perimeter, SquareAndTriangle) {
  EXPECT_DOUBLE_EQ(polygon_perimeter(make_rectangle(0, 0, 10, 10)), 40.0);
  EXPECT_NEAR(polygon_perimeter(unit_triangle()), 2 + std::sqrt(2.0), 1e-12);
}

TEST(Polygon, RejectsDegenerateInput) {
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}, {2, 2}}), DegenerateGeometryError);
  EXPECT_THROW(Polygon({{0, 0}, {1, 1}}), DegenerateGeometryError);
  EXPECT_THROW(Polygon({{0, 0}, {1, 0}, {NAN, 1}}), DegenerateGeometryError);
}

TEST(Polygon, NormalizesToCounterClockwise) {
  const Polygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_GT(signed_area(cw.vertices()), 0.0);
}

TEST(ShrinkOffset, HandValues) {
  EXPECT_NEAR(shrink_offset(make_rectangle(0, 0, 10, 10), 0.6), 1.6, 1e-12);
  EXPECT_EQ(shrink_offset(make_rectangle(0, 0, 10, 10), 1.0), 0.0);
  EXPECT_NEAR(shrink_offset(make_rectangle(0, 0, 100, 20), 0.6), 2000 * 0.64 / 240, 1e-12);
}

TEST(ShrinkOffset, RejectsBadRatio) {
  const auto sq = make_rectangle(0, 0, 10, 10);
  EXPECT_THROW(shrink_offset(sq, 0.0), ParameterError);
  EXPECT_THROW(shrink_offset(sq, 1.5), ParameterError);
  EXPECT_THROW(expand_offset(sq, 0.9), ParameterError);
}

TEST(ShrinkOffset, ScalesLinearly) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> factor(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const Polygon p(oracle::random_star(rng, {50, 50}, 5, 40));
    const double s = factor(rng);
    const double d = shrink_offset(p, 0.6);
    EXPECT_NEAR(shrink_offset(scaled(p, s), 0.6), s * d, 1e-9 * s * d);
  }
}

TEST(ExpandOffset, SignSymmetricForm) {
  EXPECT_NEAR(expand_offset(make_rectangle(0, 0, 10, 10), 1.2), 100 * 0.44 / 40, 1e-12);
}

TEST(OffsetPolygon, InsetSquare) {
  const auto mp = offset_polygon(make_rectangle(0, 0, 10, 10), -1.6);
  ASSERT_EQ(mp.parts.size(), 1u);
  // The buffer backend carries ~1e-6 px of rounding on inset corners.
  EXPECT_NEAR(polygon_area(mp), 6.8 * 6.8, 1e-4);
  for (const Point& p : mp.parts[0].vertices()) {
    EXPECT_NEAR(std::abs(p.x - 5), 3.4, 1e-5);
    EXPECT_NEAR(std::abs(p.y - 5), 3.4, 1e-5);
  }
}

TEST(OffsetPolygon, CollapsesPastInradius) {
  EXPECT_TRUE(offset_polygon(make_rectangle(0, 0, 10, 10), -6).parts.empty());
}

TEST(OffsetPolygon, ZeroIsIdentity) {
  const Polygon p({{0, 0}, {7, 1}, {3, 5}});
  const auto mp = offset_polygon(p, 0);
  ASSERT_EQ(mp.parts.size(), 1u);
  EXPECT_EQ(mp.parts[0].vertices().size(), 3u);
  EXPECT_DOUBLE_EQ(polygon_iou(mp.parts[0], p), 1.0);
}

TEST(OffsetPolygon, OutsetAreaMatchesSteinerFormula) {
  // Area of a convex polygon grown by d: A + P d + pi d^2.
  const auto sq = make_rectangle(0, 0, 10, 10);
  const double d = 2.0;
  const double expect = 100 + 40 * d + std::numbers::pi * d * d;
  EXPECT_NEAR(polygon_area(offset_polygon(sq, d)), expect, 0.01 * expect);
}

TEST(OffsetPolygon, InsetThenOutsetRoundTrip) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = make_rotated_rectangle({64, 64}, 40 + i, 20, 0.1 * i);
    const auto inner = offset_polygon(p, -3);
    ASSERT_EQ(inner.parts.size(), 1u);
    const auto back = offset_polygon(inner.parts[0], 3);
    ASSERT_EQ(back.parts.size(), 1u);
    EXPECT_GE(polygon_iou(back.parts[0], p), 0.98);
  }
}

TEST(Contains, InteriorAndExterior) {
  const auto sq = make_rectangle(0, 0, 10, 10);
  EXPECT_TRUE(contains(sq, {5, 5}));
  EXPECT_FALSE(contains(sq, {11, 5}));
  EXPECT_FALSE(contains(MultiPolygon{}, {0, 0}));
}

TEST(Rasterize, SmallSquare) {
  const auto m = rasterize(make_rectangle(1, 1, 4, 4), 6, 6);
  EXPECT_EQ(count_set(m), 9u);
  for (int r = 1; r <= 3; ++r) {
    for (int c = 1; c <= 3; ++c) EXPECT_TRUE(m(r, c));
  }
}

TEST(Rasterize, EmptyAndFull) {
  EXPECT_EQ(count_set(rasterize(MultiPolygon{}, 8, 8)), 0u);
  EXPECT_EQ(count_set(rasterize(make_rectangle(-1, -1, 9, 9), 8, 8)), 64u);
  EXPECT_THROW(rasterize(MultiPolygon{}, 0, 8), ParameterError);
}

TEST(Rasterize, MatchesWindingNumberExhaustively) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> side(8, 128);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = side(rng), h = side(rng);
    const double rmax = 0.6 * std::max(w, h);
    auto pts = oracle::random_star(rng, {w / 2.0, h / 2.0}, 0.1 * rmax, rmax, 3, 20);
    const Polygon p(pts);
    const auto mask = rasterize(p, w, h);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const Point q{c + 0.5, r + 0.5};
        if (oracle::boundary_distance(pts, q) < 1e-9) continue;
        ASSERT_EQ(mask(r, c) != 0, oracle::winding_number(pts, q) != 0)
            << "trial " << trial << " pixel " << r << "," << c;
      }
    }
  }
}

TEST(NearestBoundary, HandCases) {
  const auto sq = make_rectangle(0, 0, 10, 10);
  auto hit = nearest_boundary_point(sq, {5, -3});
  EXPECT_NEAR(hit.point.x, 5, 1e-12);
  EXPECT_NEAR(hit.point.y, 0, 1e-12);
  EXPECT_NEAR(hit.distance, 3, 1e-12);
  hit = nearest_boundary_point(sq, {10, 0});
  EXPECT_EQ(hit.distance, 0.0);
  hit = nearest_boundary_point(sq, {12, 12});
  EXPECT_NEAR(hit.point.x, 10, 1e-12);
  EXPECT_NEAR(hit.point.y, 10, 1e-12);
  EXPECT_NEAR(hit.distance, std::sqrt(8.0), 1e-12);
}

TEST(NearestBoundary, MatchesDenseSampling) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(0, 100);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = oracle::random_star(rng, {50, 50}, 10, 40);
    const Polygon p(pts);
    std::vector<Point> samples;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Point a = pts[i], b = pts[(i + 1) % pts.size()];
      for (int k = 0; k <= 2000; ++k) samples.push_back(a + (k / 2000.0) * (b - a));
    }
    for (int q = 0; q < 20; ++q) {
      const Point query{coord(rng), coord(rng)};
      double best = INFINITY;
      for (const Point& s : samples) best = std::min(best, std::hypot(s.x - query.x, s.y - query.y));
      const auto hit = nearest_boundary_point(p, query);
      EXPECT_LE(hit.distance, best + 1e-12);
      EXPECT_NEAR(hit.distance, best, 0.05);
      EXPECT_NEAR(distance(hit.point, query), hit.distance, 1e-9);
    }
  }
}

TEST(Iou, HandCases) {
  const auto a = make_rectangle(0, 0, 1, 1);
  EXPECT_NEAR(polygon_iou(a, a), 1.0, 1e-12);
  EXPECT_EQ(polygon_iou(a, make_rectangle(5, 5, 6, 6)), 0.0);
  EXPECT_NEAR(polygon_iou(a, make_rectangle(0.5, 0, 1.5, 1)), 1.0 / 3.0, 1e-12);
}

TEST(Iou, MatchesSampledMaskIou) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> shift(-15, 15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_star(rng, {40, 40}, 8, 25);
    const auto b = oracle::random_star(rng, {40 + shift(rng), 40 + shift(rng)}, 8, 25);
    EXPECT_NEAR(polygon_iou(Polygon(a), Polygon(b)), oracle::sampled_iou(a, b, 0.1), 0.01);
  }
}

TEST(Simple, DetectsBowtie) {
  EXPECT_TRUE(is_simple(make_rectangle(0, 0, 2, 2)));
  EXPECT_FALSE(is_simple(Polygon({{0, 0}, {4, 3}, {4, 0}, {0, 2}})));
}
