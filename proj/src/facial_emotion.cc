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

#include "ecx/facial_emotion.h"

#include <algorithm>
#include <cmath>

#include "ecx/errors.h"

namespace ecx {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "anger", "disgust", "fear", "joy", "sadness", "surprise", "neutral"};

}  // namespace

std::string_view EmotionName(Emotion e) {
  return kEmotionNames[static_cast<std::size_t>(e)];
}

std::optional<Emotion> ParseEmotion(std::string_view name) {
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (kEmotionNames[i] == name) return static_cast<Emotion>(i);
  }
  return std::nullopt;
}

FaceCrop CropFace(std::span<const std::uint8_t> frame, const FrameSpec& spec,
                  const Box& box, std::size_t frame_index) {
  if (frame.size() != spec.frame_bytes()) {
    throw InputError("frame size does not match spec");
  }
  const double fw = static_cast<double>(spec.width);
  const double fh = static_cast<double>(spec.height);
  const auto x0 = static_cast<std::size_t>(std::floor(std::clamp(box.x1, 0.0, fw)));
  const auto y0 = static_cast<std::size_t>(std::floor(std::clamp(box.y1, 0.0, fh)));
  const auto x1 = static_cast<std::size_t>(std::ceil(std::clamp(box.x2, 0.0, fw)));
  const auto y1 = static_cast<std::size_t>(std::ceil(std::clamp(box.y2, 0.0, fh)));
  if (x1 <= x0 || y1 <= y0) throw InputError("face box is empty after clamping");

  FaceCrop crop;
  crop.height = y1 - y0;
  crop.width = x1 - x0;
  crop.channels = spec.channels;
  crop.source_frame = frame_index;
  crop.source_box = box;
  crop.pixels.reserve(crop.height * crop.width * crop.channels);
  for (std::size_t y = y0; y < y1; ++y) {
    auto row = frame.begin() +
               static_cast<std::ptrdiff_t>((y * spec.width + x0) * spec.channels);
    crop.pixels.insert(crop.pixels.end(), row,
                       row + static_cast<std::ptrdiff_t>(crop.width * spec.channels));
  }
  return crop;
}

GridMeanExtractor::GridMeanExtractor(std::size_t rows, std::size_t cols,
                                     std::size_t channels)
    : rows_(rows), cols_(cols), channels_(channels) {
  if (rows_ == 0 || cols_ == 0 || channels_ == 0) {
    throw ContractError("feature map dims must be positive");
  }
}

Tensor GridMeanExtractor::Extract(const FaceCrop& crop) const {
  if (crop.height == 0 || crop.width == 0 || crop.channels == 0 ||
      crop.pixels.size() != crop.height * crop.width * crop.channels) {
    throw InputError("face crop is empty or inconsistent");
  }
  auto span_of = [](std::size_t i, std::size_t cells, std::size_t extent) {
    std::size_t lo = i * extent / cells;
    std::size_t hi = (i + 1) * extent / cells;
    lo = std::min(lo, extent - 1);
    hi = std::max(hi, lo + 1);
    return std::pair{lo, hi};
  };
  std::vector<double> out;
  out.reserve(rows_ * cols_ * channels_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto [ylo, yhi] = span_of(i, rows_, crop.height);
    for (std::size_t j = 0; j < cols_; ++j) {
      const auto [xlo, xhi] = span_of(j, cols_, crop.width);
      double sum = 0;
      for (std::size_t y = ylo; y < yhi; ++y) {
        for (std::size_t x = xlo; x < xhi; ++x) {
          const std::uint8_t* px =
              crop.pixels.data() + (y * crop.width + x) * crop.channels;
          double gray = 0;
          for (std::size_t k = 0; k < crop.channels; ++k) gray += px[k];
          sum += gray / static_cast<double>(crop.channels) / 255.0;
        }
      }
      const double mean = sum / static_cast<double>((yhi - ylo) * (xhi - xlo));
      out.insert(out.end(), channels_, mean);
    }
  }
  return Tensor({rows_, cols_, channels_}, std::move(out));
}

Tensor DdaAttention(const Tensor& f, Direction direction,
                    std::span<const double> kernel) {
  if (kernel.empty() || kernel.size() % 2 == 0) {
    throw ContractError("attention kernel length must be odd, got " +
                        std::to_string(kernel.size()));
  }
  if (f.rank() != 3) {
    throw ContractError("attention input must be [h,w,c], got " +
                        ShapeString(f.shape()));
  }
  const std::size_t h = f.shape()[0], w = f.shape()[1], c = f.shape()[2];
  const auto radius = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const bool along_x = direction == Direction::kX;
  const auto extent = static_cast<std::ptrdiff_t>(along_x ? w : h);
  std::vector<double> out(f.size(), 0.0);
  auto src = f.data();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const auto pos = static_cast<std::ptrdiff_t>(along_x ? x : y);
      for (std::size_t k = 0; k < c; ++k) {
        double acc = 0;
        for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
          const std::ptrdiff_t q = pos + t;
          if (q < 0 || q >= extent) continue;
          const std::size_t yy = along_x ? y : static_cast<std::size_t>(q);
          const std::size_t xx = along_x ? static_cast<std::size_t>(q) : x;
          acc += kernel[static_cast<std::size_t>(t + radius)] *
                 src[(yy * w + xx) * c + k];
        }
        out[(y * w + x) * c + k] = acc;
      }
    }
  }
  return Tensor(f.shape(), std::move(out));
}

Tensor FuseAttention(const Tensor& fx, const Tensor& fy) {
  return ElementwiseMul(ElementwiseMax(fx, fy),
                        Sigmoid(ElementwiseMul(fx, fy)));
}

EmotionPrediction ClassifyEmotion(const Tensor& f_att, const Tensor& head,
                                  const Tensor& bias) {
  if (head.rank() != 2 || head.shape()[0] != f_att.size() ||
      head.shape()[1] != kEmotionCount) {
    throw ContractError("classifier head must be [" +
                        std::to_string(f_att.size()) + ",7], got " +
                        ShapeString(head.shape()));
  }
  if (bias.size() != kEmotionCount) {
    throw ContractError("classifier bias must have 7 entries, got " +
                        ShapeString(bias.shape()));
  }
  Tensor logits = MatMul(f_att.Reshaped({1, f_att.size()}), head);
  EmotionPrediction p;
  std::size_t best = 0;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    p.logits[i] = logits[i] + bias[i];
    if (p.logits[i] > p.logits[best]) best = i;
  }
  double denom = 0;
  for (double l : p.logits) denom += std::exp(l - p.logits[best]);
  p.label = static_cast<Emotion>(best);
  p.confidence = 1.0 / denom;
  return p;
}

EmotionPrediction RecognizeEmotion(const FaceCrop& crop,
                                   const MfnExtractor& extractor,
                                   const EmotionModel& model) {
  Tensor features = extractor.Extract(crop);
  Tensor fx = DdaAttention(features, Direction::kX, model.kernel);
  Tensor fy = DdaAttention(features, Direction::kY, model.kernel);
  return ClassifyEmotion(FuseAttention(fx, fy), model.head, model.bias);
}

std::string VideoEmotionSummary::dominant_tag() const {
  return dominant ? std::string(EmotionName(*dominant)) : std::string("none");
}

VideoEmotionSummary SummarizeVideoEmotions(
    std::span<const FacePrediction> preds) {
  VideoEmotionSummary summary;
  summary.per_face.assign(preds.begin(), preds.end());
  std::array<std::vector<double>, kEmotionCount> weights;
  for (const FacePrediction& p : preds) {
    const auto idx = static_cast<std::size_t>(p.prediction.label);
    ++summary.histogram[idx];
    weights[idx].push_back(p.prediction.confidence);
  }
  double best = 0;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (static_cast<Emotion>(i) == Emotion::kNeutral || weights[i].empty()) {
      continue;
    }
    // Summing in sorted order keeps the total independent of input order.
    std::sort(weights[i].begin(), weights[i].end());
    double total = 0;
    for (double w : weights[i]) total += w;
    if (!summary.dominant || total > best) {
      summary.dominant = static_cast<Emotion>(i);
      best = total;
    }
  }
  return summary;
}

}  // namespace ecx
