// Copyright 2026 The ecx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ecx/face_detection.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecx/errors.h"

namespace ecx {

void DetectorConfig::Validate() const {
  if (anchor_scales.empty()) throw InputError("no anchor scales configured");
  for (double s : anchor_scales) {
    if (!(s > 0) || !std::isfinite(s)) {
      throw InputError("anchor scales must be positive");
    }
  }
  if (anchor_stride == 0) throw InputError("anchor stride must be positive");
  if (!(score_threshold >= 0 && score_threshold <= 1)) {
    throw InputError("score threshold must lie in [0,1]");
  }
  if (!(iou_threshold > 0 && iou_threshold < 1)) {
    throw InputError("IoU threshold must lie in (0,1)");
  }
}

std::vector<Anchor> GenerateAnchors(std::size_t feature_h,
                                    std::size_t feature_w,
                                    const DetectorConfig& cfg) {
  std::vector<Anchor> anchors;
  anchors.reserve(feature_h * feature_w * cfg.anchor_scales.size());
  const double stride = static_cast<double>(cfg.anchor_stride);
  for (std::size_t row = 0; row < feature_h; ++row) {
    for (std::size_t col = 0; col < feature_w; ++col) {
      for (std::size_t s = 0; s < cfg.anchor_scales.size(); ++s) {
        const double size = cfg.anchor_scales[s];
        anchors.push_back({(static_cast<double>(col) + 0.5) * stride,
                           (static_cast<double>(row) + 0.5) * stride, size,
                           size, s});
      }
    }
  }
  return anchors;
}

HeadOutput CenterCellHead::Score(const Tensor& feature_map,
                                 const Anchor& anchor) const {
  if (feature_map.rank() != 3 || feature_map.size() == 0) {
    throw ContractError("feature map must be a non-empty [h,w,c] tensor");
  }
  const std::size_t fh = feature_map.shape()[0];
  const std::size_t fw = feature_map.shape()[1];
  const std::size_t fc = feature_map.shape()[2];
  const double s = static_cast<double>(stride_);
  auto cell = [s](double coord, std::size_t extent) {
    const double c = std::floor(coord / s);
    if (c < 0) return std::size_t{0};
    return std::min(static_cast<std::size_t>(c), extent - 1);
  };
  const std::size_t row = cell(anchor.cy, fh), col = cell(anchor.cx, fw);
  double sum = 0;
  for (std::size_t k = 0; k < fc; ++k) sum += feature_map.at(row, col, k);
  return {Sigmoid(sum / static_cast<double>(fc)), {}};
}

PooledGrayExtractor::PooledGrayExtractor(std::size_t stride) : stride_(stride) {
  if (stride_ == 0) throw ContractError("extractor stride must be positive");
}

Tensor PooledGrayExtractor::Extract(std::span<const std::uint8_t> frame,
                                    const FrameSpec& spec) const {
  const std::size_t fh = (spec.height + stride_ - 1) / stride_;
  const std::size_t fw = (spec.width + stride_ - 1) / stride_;
  std::vector<double> out(fh * fw, 0.0);
  for (std::size_t r = 0; r < fh; ++r) {
    for (std::size_t c = 0; c < fw; ++c) {
      const std::size_t y_end = std::min(spec.height, (r + 1) * stride_);
      const std::size_t x_end = std::min(spec.width, (c + 1) * stride_);
      double sum = 0;
      std::size_t count = 0;
      for (std::size_t y = r * stride_; y < y_end; ++y) {
        for (std::size_t x = c * stride_; x < x_end; ++x) {
          const std::uint8_t* px =
              frame.data() + (y * spec.width + x) * spec.channels;
          for (std::size_t k = 0; k < spec.channels; ++k) sum += px[k];
          count += spec.channels;
        }
      }
      out[r * fw + c] = sum / static_cast<double>(count) / 127.5 - 1.0;
    }
  }
  return Tensor({fh, fw, 1}, std::move(out));
}

std::vector<Detection> ScoreAnchors(const Tensor& feature_map,
                                    std::span<const Anchor> anchors,
                                    const DetectionHead& head) {
  std::vector<Detection> out;
  out.reserve(anchors.size());
  for (const Anchor& a : anchors) {
    HeadOutput h = head.Score(feature_map, a);
    if (!(h.score >= 0 && h.score <= 1)) {
      throw BackendError("detection head '" + head.name() +
                         "' returned score outside [0,1]");
    }
    out.push_back({a.box(), h.score, h.deltas});
  }
  return out;
}

DecodeResult DecodeBoxes(std::span<const Detection> detections,
                         const FrameSpec& frame) {
  DecodeResult result;
  const double fw = static_cast<double>(frame.width);
  const double fh = static_cast<double>(frame.height);
  for (const Detection& d : detections) {
    const BoxDeltas& t = d.deltas;
    if (!std::isfinite(t.dx) || !std::isfinite(t.dy) || !std::isfinite(t.dw) ||
        !std::isfinite(t.dh)) {
      throw ContractError("non-finite regression deltas");
    }
    const double w = d.box.width(), h = d.box.height();
    const double cx = d.box.x1 + w / 2 + t.dx * w;
    const double cy = d.box.y1 + h / 2 + t.dy * h;
    const double nw = w * std::exp(t.dw);
    const double nh = h * std::exp(t.dh);
    Box b{std::clamp(cx - nw / 2, 0.0, fw), std::clamp(cy - nh / 2, 0.0, fh),
          std::clamp(cx + nw / 2, 0.0, fw), std::clamp(cy + nh / 2, 0.0, fh)};
    if (!b.valid()) {
      ++result.dropped;
      continue;
    }
    result.detections.push_back({b, d.face_score, {}});
  }
  return result;
}

double Iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Detection> Nms(std::span<const Detection> detections,
                           const DetectorConfig& cfg) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].face_score >= cfg.score_threshold) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     const Detection& da = detections[a];
                     const Detection& db = detections[b];
                     if (da.face_score != db.face_score) {
                       return da.face_score > db.face_score;
                     }
                     return da.box.area() < db.box.area();
                   });
  std::vector<Detection> kept;
  for (std::size_t idx : order) {
    const Detection& cand = detections[idx];
    const bool suppressed =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
          return Iou(k.box, cand.box) > cfg.iou_threshold;
        });
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

std::vector<Detection> DetectFaces(std::span<const std::uint8_t> frame,
                                   const FrameSpec& spec,
                                   const DetectorConfig& cfg,
                                   const FeatureExtractor& extractor,
                                   const DetectionHead& head) {
  Tensor features = extractor.Extract(frame, spec);
  std::vector<Anchor> anchors =
      GenerateAnchors(features.shape()[0], features.shape()[1], cfg);
  std::vector<Detection> scored = ScoreAnchors(features, anchors, head);
  return Nms(DecodeBoxes(scored, spec).detections, cfg);
}

}  // namespace ecx
