#pragma once

// Detection evaluation: greedy IoU matching over a threshold sweep, and an
// area recall / area precision (TR/TP) one-to-one protocol.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <vector>

#include "bdreg/decoder.hpp"
#include "bdreg/encoder.hpp"
#include "bdreg/geometry.hpp"

namespace bdreg {

struct EvalConfig {
  std::vector<double> iou_thresholds{0.5, 0.6, 0.7, 0.8, 0.9};
  double tr = 0.7;  // min area(gt & det) / area(gt)
  double tp = 0.6;  // min area(gt & det) / area(det)
  /// A detection mostly inside a do-not-care region is dropped when its area
  /// precision against that region reaches this value.
  double ignore_overlap = 0.5;

  void validate() const {
    for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
      const double t = iou_thresholds[i];
      if (!(t > 0.0 && t <= 1.0) || (i > 0 && !(t > iou_thresholds[i - 1]))) {
        throw ParameterError("iou thresholds must be strictly increasing in (0, 1]");
      }
    }
    if (!(tr > 0.0 && tr <= 1.0) || !(tp > 0.0 && tp <= 1.0)) {
      throw ParameterError("tr and tp must be in (0, 1]");
    }
  }
};

/// Micro-averaging counts; merging datasets is element-wise addition.
struct MatchCounts {
  std::size_t true_positives = 0;
  std::size_t detections = 0;     // counted (non-discarded) detections
  std::size_t ground_truths = 0;  // non-ignore ground truths
  std::size_t ignored_detections = 0;

  MatchCounts& operator+=(const MatchCounts& o) noexcept {
    true_positives += o.true_positives;
    detections += o.detections;
    ground_truths += o.ground_truths;
    ignored_detections += o.ignored_detections;
    return *this;
  }
  friend MatchCounts operator+(MatchCounts a, const MatchCounts& b) noexcept { return a += b; }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

inline double harmonic_mean(double p, double r) noexcept {
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline PRF to_prf(const MatchCounts& c) noexcept {
  PRF m;
  m.precision = c.detections ? static_cast<double>(c.true_positives) / c.detections : 0.0;
  m.recall = c.ground_truths ? static_cast<double>(c.true_positives) / c.ground_truths : 0.0;
  m.f_score = harmonic_mean(m.precision, m.recall);
  return m;
}

struct MatchPair {
  std::size_t det = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  MatchCounts counts;
  PRF metrics;
};

namespace detail {

struct OverlapTable {
  std::size_t n_det = 0, n_gt = 0;
  std::vector<double> inter;  // det-major
  std::vector<double> det_area, gt_area;

  double at(std::size_t d, std::size_t g) const { return inter[d * n_gt + g]; }
  double iou(std::size_t d, std::size_t g) const {
    const double u = det_area[d] + gt_area[g] - at(d, g);
    return u > 0.0 ? std::clamp(at(d, g) / u, 0.0, 1.0) : 0.0;
  }
};

inline OverlapTable overlaps(const std::vector<DecodedInstance>& dets,
                             const std::vector<TextAnnotation>& gts) {
  OverlapTable t{dets.size(), gts.size(), std::vector<double>(dets.size() * gts.size()), {}, {}};
  for (const auto& d : dets) t.det_area.push_back(polygon_area(d.polygon));
  for (const auto& g : gts) t.gt_area.push_back(polygon_area(g.polygon));
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      t.inter[d * t.n_gt + g] = intersection_area(dets[d].polygon, gts[g].polygon);
    }
  }
  return t;
}

// A detection is discarded when its highest-IoU ground truth is a
// do-not-care one that covers at least `ignore_overlap` of its area.
inline std::vector<std::uint8_t> discarded(const OverlapTable& t,
                                           const std::vector<TextAnnotation>& gts,
                                           double ignore_overlap) {
  std::vector<std::uint8_t> out(t.n_det, 0);
  for (std::size_t d = 0; d < t.n_det; ++d) {
    std::size_t best = t.n_gt;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < t.n_gt; ++g) {
      const double v = t.iou(d, g);
      if (v > best_iou) best_iou = v, best = g;
    }
    if (best < t.n_gt && gts[best].ignore && t.det_area[d] > 0.0 &&
        t.at(d, best) / t.det_area[d] >= ignore_overlap) {
      out[d] = 1;
    }
  }
  return out;
}

inline std::size_t count_cared(const std::vector<TextAnnotation>& gts) {
  return static_cast<std::size_t>(
      std::count_if(gts.begin(), gts.end(), [](const TextAnnotation& g) { return !g.ignore; }));
}

inline MatchResult match_iou(const OverlapTable& t, const std::vector<DecodedInstance>& dets,
                             const std::vector<TextAnnotation>& gts, double threshold,
                             const std::vector<std::uint8_t>& drop) {
  MatchResult res;
  res.counts.ground_truths = count_cared(gts);
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  std::vector<std::uint8_t> taken(gts.size(), 0);
  for (std::size_t d : order) {
    if (drop[d]) {
      ++res.counts.ignored_detections;
      continue;
    }
    ++res.counts.detections;
    std::size_t best = gts.size();
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].ignore) continue;
      const double v = t.iou(d, g);
      if (v > best_iou) best_iou = v, best = g;
    }
    if (best < gts.size() && best_iou >= threshold) {
      taken[best] = 1;
      res.pairs.push_back({d, best, best_iou});
      ++res.counts.true_positives;
    }
  }
  res.metrics = to_prf(res.counts);
  return res;
}

inline MatchResult match_deteval(const OverlapTable& t, const std::vector<TextAnnotation>& gts,
                                 const EvalConfig& cfg, const std::vector<std::uint8_t>& drop) {
  MatchResult res;
  res.counts.ground_truths = count_cared(gts);
  auto qualifies = [&](std::size_t d, std::size_t g) {
    if (drop[d] || gts[g].ignore) return false;
    const double inter = t.at(d, g);
    return t.gt_area[g] > 0.0 && t.det_area[d] > 0.0 && inter / t.gt_area[g] >= cfg.tr &&
           inter / t.det_area[d] >= cfg.tp;
  };
  for (std::size_t d = 0; d < t.n_det; ++d) {
    if (drop[d]) {
      ++res.counts.ignored_detections;
    } else {
      ++res.counts.detections;
    }
  }
  // One-to-one only: a hit needs the pair to be each other's sole candidate.
  for (std::size_t g = 0; g < t.n_gt; ++g) {
    std::size_t hits = 0, which = 0;
    for (std::size_t d = 0; d < t.n_det; ++d) {
      if (qualifies(d, g)) ++hits, which = d;
    }
    if (hits != 1) continue;
    std::size_t det_hits = 0;
    for (std::size_t g2 = 0; g2 < t.n_gt; ++g2) det_hits += qualifies(which, g2);
    if (det_hits != 1) continue;
    res.pairs.push_back({which, g, t.iou(which, g)});
    ++res.counts.true_positives;
  }
  res.metrics = to_prf(res.counts);
  return res;
}

}  // namespace detail

/// Greedy one-to-one matching in descending score order (stable, so ties keep
/// detection order); each detection takes the unmatched ground truth with the
/// highest IoU (ties: lowest index) if it reaches `threshold`.
inline MatchResult match_iou(const std::vector<DecodedInstance>& dets,
                             const std::vector<TextAnnotation>& gts, double threshold,
                             double ignore_overlap = 0.5) {
  const auto t = detail::overlaps(dets, gts);
  return detail::match_iou(t, dets, gts, threshold, detail::discarded(t, gts, ignore_overlap));
}

/// TR/TP protocol with one-to-one matches only; split and merged detections
/// score zero.
inline MatchResult match_deteval(const std::vector<DecodedInstance>& dets,
                                 const std::vector<TextAnnotation>& gts, const EvalConfig& cfg) {
  const auto t = detail::overlaps(dets, gts);
  return detail::match_deteval(t, gts, cfg, detail::discarded(t, gts, cfg.ignore_overlap));
}

struct ThresholdRow {
  double threshold = 0.0;
  MatchCounts counts;
  PRF metrics;
};

struct ImageMatches {
  std::size_t image = 0;
  double threshold = 0.0;  // 0 marks the TR/TP protocol
  std::vector<MatchPair> pairs;
};

struct EvalReport {
  std::vector<ThresholdRow> iou_rows;
  ThresholdRow deteval;  // threshold field unused
  std::vector<ImageMatches> matches;

  const ThresholdRow* at_threshold(double t) const {
    for (const auto& r : iou_rows) {
      if (std::abs(r.threshold - t) < 1e-12) return &r;
    }
    return nullptr;
  }
};

/// Runs every IoU threshold and the TR/TP protocol over a dataset and
/// micro-averages the counts.
inline EvalReport sweep(const std::vector<std::vector<DecodedInstance>>& dets,
                        const std::vector<std::vector<TextAnnotation>>& gts, const EvalConfig& cfg) {
  cfg.validate();
  if (dets.size() != gts.size()) {
    throw ShapeError("sweep: detection and ground-truth image counts differ");
  }
  EvalReport rep;
  for (double t : cfg.iou_thresholds) rep.iou_rows.push_back({t, {}, {}});
  for (std::size_t img = 0; img < dets.size(); ++img) {
    const auto table = detail::overlaps(dets[img], gts[img]);
    const auto drop = detail::discarded(table, gts[img], cfg.ignore_overlap);
    for (auto& row : rep.iou_rows) {
      auto m = detail::match_iou(table, dets[img], gts[img], row.threshold, drop);
      row.counts += m.counts;
      rep.matches.push_back({img, row.threshold, std::move(m.pairs)});
    }
    auto m = detail::match_deteval(table, gts[img], cfg, drop);
    rep.deteval.counts += m.counts;
    rep.matches.push_back({img, 0.0, std::move(m.pairs)});
  }
  for (auto& row : rep.iou_rows) row.metrics = to_prf(row.counts);
  rep.deteval.metrics = to_prf(rep.deteval.counts);
  return rep;
}

}  // namespace bdreg
