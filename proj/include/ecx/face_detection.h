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

#ifndef ECX_FACE_DETECTION_H_
#define ECX_FACE_DETECTION_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecx/frame.h"
#include "ecx/tensor.h"

namespace ecx {

// Corner-form box in pixels.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  bool valid() const { return x1 < x2 && y1 < y2; }

  friend bool operator==(const Box&, const Box&) = default;
};

struct Anchor {
  double cx = 0, cy = 0;
  double width = 0, height = 0;
  std::size_t scale_index = 0;

  Box box() const {
    return {cx - width / 2, cy - height / 2, cx + width / 2, cy + height / 2};
  }
};

struct BoxDeltas {
  double dx = 0, dy = 0, dw = 0, dh = 0;
};

struct Detection {
  Box box;
  double face_score = 0;
  BoxDeltas deltas;
};

struct DetectorConfig {
  std::vector<double> anchor_scales{16, 32};
  std::size_t anchor_stride = 16;
  double score_threshold = 0.5;
  double iou_threshold = 0.5;

  // Throws InputError on out-of-range thresholds or empty/non-positive scales.
  void Validate() const;
};

// One square anchor per (cell, scale), cells row-major, scales innermost.
// Centers sit at ((col + 0.5) * stride, (row + 0.5) * stride).
std::vector<Anchor> GenerateAnchors(std::size_t feature_h,
                                    std::size_t feature_w,
                                    const DetectorConfig& cfg);

struct HeadOutput {
  double score = 0;
  BoxDeltas deltas;
};

// Classifies and regresses one anchor against a [fh, fw, C] feature map.
class DetectionHead {
 public:
  virtual ~DetectionHead() = default;
  virtual std::string name() const = 0;
  virtual HeadOutput Score(const Tensor& feature_map,
                           const Anchor& anchor) const = 0;
};

// Score = sigmoid(mean over channels of the feature cell containing the
// anchor center); zero deltas.
class CenterCellHead : public DetectionHead {
 public:
  explicit CenterCellHead(std::size_t stride) : stride_(stride) {}
  std::string name() const override { return "center-cell"; }
  HeadOutput Score(const Tensor& feature_map,
                   const Anchor& anchor) const override;

 private:
  std::size_t stride_;
};

class ConstantHead : public DetectionHead {
 public:
  explicit ConstantHead(double score, BoxDeltas deltas = {})
      : output_{score, deltas} {}
  std::string name() const override { return "constant"; }
  HeadOutput Score(const Tensor&, const Anchor&) const override {
    return output_;
  }

 private:
  HeadOutput output_;
};

// Produces the detector feature map F for a frame.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string name() const = 0;
  virtual Tensor Extract(std::span<const std::uint8_t> frame,
                         const FrameSpec& spec) const = 0;
};

// Grayscale (channel mean) average-pooled over stride x stride blocks and
// mapped from [0,255] to [-1,1]. Output [ceil(H/s), ceil(W/s), 1]; edge
// blocks average whatever pixels they cover.
class PooledGrayExtractor : public FeatureExtractor {
 public:
  explicit PooledGrayExtractor(std::size_t stride);
  std::string name() const override { return "pooled-gray"; }
  Tensor Extract(std::span<const std::uint8_t> frame,
                 const FrameSpec& spec) const override;

 private:
  std::size_t stride_;
};

std::vector<Detection> ScoreAnchors(const Tensor& feature_map,
                                    std::span<const Anchor> anchors,
                                    const DetectionHead& head);

struct DecodeResult {
  std::vector<Detection> detections;
  // Boxes with zero area after clamping to the frame.
  std::size_t dropped = 0;
};

// Applies each detection's deltas to its (anchor) box:
// cx' = cx + dx*w, cy' = cy + dy*h, w' = w*exp(dw), h' = h*exp(dh),
// then clamps to [0,W] x [0,H]. Deltas are consumed (zeroed) in the output.
DecodeResult DecodeBoxes(std::span<const Detection> detections,
                         const FrameSpec& frame);

double Iou(const Box& a, const Box& b);

// Greedy suppression. Drops scores below cfg.score_threshold, orders by
// score descending (ties: smaller area, then input order) and keeps a box
// iff its IoU with every kept box is <= cfg.iou_threshold.
std::vector<Detection> Nms(std::span<const Detection> detections,
                           const DetectorConfig& cfg);

// extract -> anchors -> score -> decode -> NMS for a single frame.
std::vector<Detection> DetectFaces(std::span<const std::uint8_t> frame,
                                   const FrameSpec& spec,
                                   const DetectorConfig& cfg,
                                   const FeatureExtractor& extractor,
                                   const DetectionHead& head);

}  // namespace ecx

#endif  // ECX_FACE_DETECTION_H_
