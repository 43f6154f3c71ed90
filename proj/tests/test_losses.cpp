#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bdreg/losses.hpp"
#include "bdreg/synth.hpp"
#include "loss_reference.hpp"

using namespace bdreg;
using namespace bdreg::oracle;

namespace {

void expect_rel(double got, double want) {
  EXPECT_LE(std::abs(got - want), 1e-12 * std::max(1.0, std::abs(want))) << got << " vs " << want;
}

}  // namespace

TEST(LossOracles, DiceMatchesNaiveReference) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_maps(rng);
    expect_rel(dice_loss(m.pred, m.gt, m.select), ref_dice(m));
  }
}

TEST(LossOracles, OhemMatchesNaiveReference) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    auto m = random_maps(rng);
    // Coarse scores force ties.
    if (i % 2) {
      for (auto& v : m.pred.values()) v = std::round(v * 4) / 4;
    }
    const double ratio = 1.0 + i % 4;
    EXPECT_EQ(ohem_select(m.pred, m.gt, m.select, ratio), ref_ohem(m, ratio));
  }
}

TEST(LossOracles, SmoothL1MatchesNaiveReference) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_maps(rng);
    expect_rel(offset_loss(m.pv, m.gv, m.select), ref_offset(m));
  }
}

TEST(LossOracles, CosineMatchesNaiveReference) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    auto m = random_maps(rng);
    // Ground-truth orientations are unit vectors.
    for (std::size_t k = 0; k < m.gv.x.size(); ++k) {
      const double len = std::hypot(m.gv.x[k], m.gv.y[k]);
      m.gv.x[k] = static_cast<float>(m.gv.x[k] / len);
      m.gv.y[k] = static_cast<float>(m.gv.y[k] / len);
    }
    expect_rel(orientation_loss(m.pv, m.gv, m.select), ref_cosine(m));
  }
}

TEST(Dice, HandValues) {
  FloatMap pred(4, 4);
  RasterMask gt(4, 4), all(4, 4, 1);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 4; ++c) gt(r, c) = 1;
  }
  for (std::size_t i = 0; i < gt.size(); ++i) pred[i] = gt[i];
  EXPECT_EQ(dice_loss(pred, gt, all), 0.0);
  for (std::size_t i = 0; i < gt.size(); ++i) pred[i] = 1.0f - gt[i];
  EXPECT_EQ(dice_loss(pred, gt, all), 1.0);
  pred.fill(0.5f);
  // 1 - 2 * (8 * 0.5) / (16 * 0.25 + 8) = 1 / 3.
  EXPECT_NEAR(dice_loss(pred, gt, all), 1.0 / 3.0, 1e-15);
}

TEST(Ohem, KeepsTopThirtyNegatives) {
  FloatMap pred(101, 10);
  RasterMask gt(101, 10), train(101, 10, 1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<float> unit(0, 1);
  for (auto& v : pred.values()) v = unit(rng);
  for (int c = 0; c < 10; ++c) gt(0, c) = 1;
  train(0, 10) = 0;  // 1000 negatives remain
  const auto sel = ohem_select(pred, gt, train, 3.0);
  EXPECT_EQ(count_set(sel), 40u);
  std::vector<float> neg;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (train[i] && !gt[i]) neg.push_back(pred[i]);
  }
  std::sort(neg.begin(), neg.end(), std::greater<>());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (sel[i] && !gt[i]) {
      EXPECT_GE(pred[i], neg[29]);
    }
  }
}

TEST(Ohem, FewNegativesAreAllKept) {
  FloatMap pred(4, 1);
  RasterMask gt(4, 1), train(4, 1, 1);
  gt[0] = gt[1] = 1;
  EXPECT_EQ(count_set(ohem_select(pred, gt, train, 3.0)), 4u);
  gt.fill(1);
  EXPECT_EQ(ohem_select(pred, gt, train, 3.0), gt);
}

TEST(SmoothL1, HandValues) {
  VectorField p(1, 1), g(1, 1);
  const RasterMask one(1, 1, 1);
  EXPECT_EQ(offset_loss(p, g, one), 0.0);
  p.x[0] = 0.5f;
  EXPECT_DOUBLE_EQ(offset_loss(p, g, one), 0.125);
  p.x[0] = 3.0f;
  EXPECT_DOUBLE_EQ(offset_loss(p, g, one), 2.5);
}

TEST(Cosine, HandValues) {
  VectorField p(1, 1), g(1, 1);
  const RasterMask one(1, 1, 1);
  g.x[0] = 1;
  p.x[0] = 2;
  EXPECT_DOUBLE_EQ(orientation_loss(p, g, one), 0.0);
  p.x[0] = -3;
  EXPECT_DOUBLE_EQ(orientation_loss(p, g, one), 2.0);
  p.x[0] = 0;
  p.y[0] = 1;
  EXPECT_DOUBLE_EQ(orientation_loss(p, g, one), 1.0);
  EXPECT_EQ(orientation_loss(p, g, RasterMask(1, 1)), 0.0);
}

TEST(TotalLoss, HandCombination) {
  const LossBreakdown b{0.2, 0.1, 0.3, 0.4, 0.0};
  EXPECT_NEAR(combine(b, {}), 0.32, 1e-15);
}

TEST(TotalLoss, PerfectPredictionIsZero) {
  const auto img = synth::synthesize(synth::Family::rect, 1, 4)[0];
  const auto gt = encode(img.annotations, img.width, img.height, {});
  const auto b = total_loss({perfect_scores(gt), gt}, {});
  EXPECT_EQ(b.text, 0.0);
  EXPECT_EQ(b.kernel, 0.0);
  EXPECT_NEAR(b.offset, 0.0, 1e-15);
  EXPECT_NEAR(b.orientation, 0.0, 1e-6);
}

TEST(TotalLoss, EmptyImageUsesNegativesOnly) {
  const auto gt = encode({}, 32, 32, {});
  ScoreMaps pred(32, 32);
  pred.text_region.fill(0.3f);
  pred.text_kernel.fill(0.7f);
  const auto b = total_loss({pred, gt}, {});
  EXPECT_EQ(b.kernel, 0.0);
  EXPECT_EQ(b.offset, 0.0);
  EXPECT_EQ(b.orientation, 0.0);
  EXPECT_DOUBLE_EQ(b.text, 1.0);
}

TEST(TotalLoss, RecombinesTermsAndMasksExactly) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<float> unit(0, 1), vec(-3, 3);
  for (const auto& img : synth::synthesize(synth::Family::nested, 6, 8)) {
    for (auto mode : {Expression::bidirectional, Expression::msr}) {
      EncoderConfig cfg;
      cfg.mode = mode;
      auto anns = img.annotations;
      anns[0].ignore = true;
      const auto gt = encode(anns, img.width, img.height, cfg);
      ScoreMaps pred(img.width, img.height);
      for (std::size_t i = 0; i < pred.text_region.size(); ++i) {
        pred.text_region[i] = unit(rng);
        pred.text_kernel[i] = unit(rng);
        pred.offset.x[i] = vec(rng), pred.offset.y[i] = vec(rng);
        pred.orientation.x[i] = vec(rng), pred.orientation.y[i] = vec(rng);
      }
      const LossWeights w;
      const auto b = total_loss({pred, gt}, w);
      EXPECT_EQ(b.total, b.text + 0.5 * b.kernel + 0.1 * (b.offset + b.orientation));

      RasterMask kernel_sel(gt.width(), gt.height());
      for (std::size_t i = 0; i < kernel_sel.size(); ++i) kernel_sel[i] = gt.text_region[i] && gt.train_mask[i];
      EXPECT_EQ(b.text, dice_loss(pred.text_region, gt.text_region,
                                  ohem_select(pred.text_region, gt.text_region, gt.train_mask, 3.0)));
      EXPECT_EQ(b.kernel, dice_loss(pred.text_kernel, gt.text_kernel, kernel_sel));
      EXPECT_EQ(b.offset, offset_loss(pred.offset, gt.offset, gt.regression_mask()));
      if (mode == Expression::msr) {
        EXPECT_EQ(b.orientation, 0.0);
      }

      // Predictions on excluded pixels cannot change the loss.
      ScoreMaps adversarial = pred;
      for (std::size_t i = 0; i < gt.train_mask.size(); ++i) {
        if (gt.train_mask[i]) continue;
        adversarial.text_region[i] = 1.0f;
        adversarial.text_kernel[i] = 1.0f;
        adversarial.offset.x[i] = 1e6f;
        adversarial.orientation.y[i] = -1e6f;
      }
      const auto a = total_loss({adversarial, gt}, w);
      EXPECT_EQ(a.total, b.total);
      EXPECT_EQ(a.text, b.text);
    }
  }
}

TEST(TotalLoss, RejectsBadWeights) {
  const auto gt = encode({}, 4, 4, {});
  LossWeights w;
  w.ohem_ratio = 0;
  EXPECT_THROW(total_loss({ScoreMaps(4, 4), gt}, w), ParameterError);
  EXPECT_THROW(total_loss({ScoreMaps(4, 5), gt}, {}), ShapeError);
}

TEST(NumericGradient, SmoothL1Derivative) {
  const auto f = [](const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += smooth_l1(v);
    return s;
  };
  const std::vector<double> x{-3.0, -0.4, 0.2, 0.9, 2.5};
  const auto g = numeric_gradient(f, x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(g[i], std::clamp(x[i], -1.0, 1.0), 1e-6);
}
