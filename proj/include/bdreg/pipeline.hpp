#pragma once

// Encode -> decode -> evaluate helpers shared by the command-line tool and
// the acceptance checks.

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "bdreg/decoder.hpp"
#include "bdreg/encoder.hpp"
#include "bdreg/eval.hpp"

namespace bdreg {

struct AnnotatedImage {
  std::string name;
  int width = 0;
  int height = 0;
  std::vector<TextAnnotation> annotations;
};

struct RoundTripRow {
  int id = 0;
  double iou = 0.0;  // best IoU among decoded instances, 0 if none
};

struct RoundTripResult {
  std::vector<RoundTripRow> rows;  // one per non-ignore annotation
  std::vector<DecodedInstance> decoded;
};

/// Decodes the perfect score maps of `image` in the expression selected by
/// `enc.mode` and scores every non-ignore annotation against the decoded set.
inline RoundTripResult roundtrip(const AnnotatedImage& image, const EncoderConfig& enc,
                                 const DecoderConfig& dec) {
  const auto labels = encode(image.annotations, image.width, image.height, enc);
  RoundTripResult res;
  res.decoded = decode(perfect_scores(labels), dec, enc.mode);
  for (const auto& a : image.annotations) {
    if (a.ignore) continue;
    double best = 0.0;
    for (const auto& d : res.decoded) best = std::max(best, polygon_iou(d.polygon, a.polygon));
    res.rows.push_back({a.id, best});
  }
  return res;
}

struct IouSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline IouSummary summarize(const std::vector<double>& ious) {
  IouSummary s;
  s.count = ious.size();
  if (ious.empty()) return s;
  double sum = 0.0;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -s.min;
  for (double v : ious) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(ious.size());
  return s;
}

struct ExpressionComparison {
  EvalReport bidirectional;
  EvalReport msr;
};

/// Runs encode -> perfect maps -> decode in both expressions on the same
/// images and evaluates each against the annotations.
inline ExpressionComparison compare_expressions(const std::vector<AnnotatedImage>& images,
                                                EncoderConfig enc, const DecoderConfig& dec,
                                                const EvalConfig& ev) {
  std::vector<std::vector<TextAnnotation>> gts;
  for (const auto& img : images) gts.push_back(img.annotations);
  ExpressionComparison out;
  for (auto mode : {Expression::bidirectional, Expression::msr}) {
    enc.mode = mode;
    std::vector<std::vector<DecodedInstance>> dets;
    for (const auto& img : images) dets.push_back(roundtrip(img, enc, dec).decoded);
    (mode == Expression::msr ? out.msr : out.bidirectional) = sweep(dets, gts, ev);
  }
  return out;
}

}  // namespace bdreg
