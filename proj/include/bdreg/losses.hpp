#pragma once

// Training objective as plain array math: dice loss (with hard negative
// mining on the text region), Smooth L1 on offsets, cosine loss on
// orientations, and their weighted sum.
//
// Empty-domain convention: a loss over zero pixels is 0.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "bdreg/decoder.hpp"
#include "bdreg/encoder.hpp"
#include "bdreg/grid.hpp"

namespace bdreg {

struct LossWeights {
  double lambda1 = 0.5;     // kernel term
  double lambda2 = 0.1;     // offset + orientation terms
  double ohem_ratio = 3.0;  // negatives kept per positive

  void validate() const {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0) || !(ohem_ratio > 0.0)) {
      std::ostringstream os;
      os << "loss weights must be positive (lambda1=" << lambda1 << ", lambda2=" << lambda2
         << ", ohem_ratio=" << ohem_ratio << ")";
      throw ParameterError(os.str());
    }
  }
};

/// 1 - 2 sum(p g) / (sum p^2 + sum g^2) over the selected pixels.
inline double dice_loss(const FloatMap& pred, const RasterMask& gt, const RasterMask& select) {
  require_same_shape(pred, gt, "dice_loss gt");
  require_same_shape(pred, select, "dice_loss select");
  double inter = 0.0, pp = 0.0, gg = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!select[i]) continue;
    const double p = pred[i];
    const double g = gt[i] ? 1.0 : 0.0;
    inter += p * g;
    pp += p * p;
    gg += g * g;
  }
  const double denom = pp + gg;
  if (!(denom > 0.0)) return 0.0;
  return 1.0 - 2.0 * inter / denom;
}

/// Negatives kept when the image has no positive pixel.
inline constexpr std::size_t kOhemEmptyBase = 256;

/// Online hard example mining: keeps every positive pixel inside the train
/// mask plus the min(#neg, ratio * #pos) negatives with the highest predicted
/// text probability (ties: lower pixel index first). Without positives,
/// max(256, ratio * 256) negatives are kept.
inline RasterMask ohem_select(const FloatMap& pred, const RasterMask& gt,
                              const RasterMask& train_mask, double ratio) {
  require_same_shape(pred, gt, "ohem_select gt");
  require_same_shape(pred, train_mask, "ohem_select train_mask");
  if (!(ratio > 0.0)) throw ParameterError("ohem ratio must be positive");
  RasterMask sel(pred.width(), pred.height());
  std::vector<std::size_t> negatives;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!train_mask[i]) continue;
    if (gt[i]) {
      sel[i] = 1;
      ++positives;
    } else {
      negatives.push_back(i);
    }
  }
  const double quota = positives > 0
                           ? ratio * static_cast<double>(positives)
                           : std::max<double>(kOhemEmptyBase, ratio * kOhemEmptyBase);
  const std::size_t keep =
      std::min(negatives.size(), static_cast<std::size_t>(std::floor(quota)));
  auto harder = [&](std::size_t a, std::size_t b) {
    if (pred[a] != pred[b]) return pred[a] > pred[b];
    return a < b;
  };
  if (keep < negatives.size()) {
    std::nth_element(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(keep),
                     negatives.end(), harder);
  }
  for (std::size_t j = 0; j < keep; ++j) sel[negatives[j]] = 1;
  return sel;
}

inline double smooth_l1(double x) noexcept {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

/// Mean over `border` pixels of the per-channel Smooth L1 summed over x and y.
inline double offset_loss(const VectorField& pred, const VectorField& gt, const RasterMask& border) {
  require_same_shape(pred.x, gt.x, "offset_loss gt");
  require_same_shape(pred.x, pred.y, "offset_loss pred.y");
  require_same_shape(gt.x, gt.y, "offset_loss gt.y");
  require_same_shape(pred.x, border, "offset_loss border");
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < border.size(); ++i) {
    if (!border[i]) continue;
    acc += smooth_l1(static_cast<double>(pred.x[i]) - gt.x[i]) +
           smooth_l1(static_cast<double>(pred.y[i]) - gt.y[i]);
    ++n;
  }
  return n ? acc / static_cast<double>(n) : 0.0;
}

/// Mean over `border` pixels of 1 - cos(angle between pred and gt). The
/// prediction is normalized first; a zero prediction costs 1.
inline double orientation_loss(const VectorField& pred, const VectorField& gt,
                               const RasterMask& border) {
  require_same_shape(pred.x, gt.x, "orientation_loss gt");
  require_same_shape(pred.x, pred.y, "orientation_loss pred.y");
  require_same_shape(gt.x, gt.y, "orientation_loss gt.y");
  require_same_shape(pred.x, border, "orientation_loss border");
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < border.size(); ++i) {
    if (!border[i]) continue;
    const double px = pred.x[i], py = pred.y[i];
    const double len = std::hypot(px, py);
    const double cosine = len > 0.0 ? (px * gt.x[i] + py * gt.y[i]) / len : 0.0;
    acc += 1.0 - cosine;
    ++n;
  }
  return n ? acc / static_cast<double>(n) : 0.0;
}

struct LossBreakdown {
  double text = 0.0;
  double kernel = 0.0;
  double offset = 0.0;
  double orientation = 0.0;
  double total = 0.0;
};

inline double combine(const LossBreakdown& b, const LossWeights& w) noexcept {
  return b.text + w.lambda1 * b.kernel + w.lambda2 * (b.offset + b.orientation);
}

struct PredictionBatch {
  const ScoreMaps& pred;
  const LabelMaps& gt;
};

/// L = L_text + lambda1 L_kernel + lambda2 (L_offset + L_orientation).
/// L_text runs on the OHEM selection, L_kernel on ground-truth text pixels,
/// both regression terms on `gt.regression_mask()`; all within the train mask.
inline LossBreakdown total_loss(const PredictionBatch& batch, const LossWeights& w) {
  w.validate();
  const ScoreMaps& pred = batch.pred;
  const LabelMaps& gt = batch.gt;
  pred.validate();
  require_same_shape(pred.text_region, gt.text_region, "total_loss labels");

  LossBreakdown b;
  const RasterMask text_sel = ohem_select(pred.text_region, gt.text_region, gt.train_mask, w.ohem_ratio);
  b.text = dice_loss(pred.text_region, gt.text_region, text_sel);

  RasterMask kernel_sel(gt.width(), gt.height());
  for (std::size_t i = 0; i < kernel_sel.size(); ++i) {
    kernel_sel[i] = gt.text_region[i] && gt.train_mask[i];
  }
  b.kernel = dice_loss(pred.text_kernel, gt.text_kernel, kernel_sel);

  const RasterMask band = gt.regression_mask();
  b.offset = offset_loss(pred.offset, gt.offset, band);
  b.orientation = gt.mode == Expression::msr ? 0.0 : orientation_loss(pred.orientation, gt.orientation, band);
  b.total = combine(b, w);
  return b;
}

/// Central finite-difference gradient of a scalar function, for checking a
/// differentiable port of these losses.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double step = 1e-6) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    const double up = f(x);
    x[i] = orig - step;
    const double down = f(x);
    x[i] = orig;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace bdreg
