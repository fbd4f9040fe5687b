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

#ifndef ECX_FACIAL_EMOTION_H_
#define ECX_FACIAL_EMOTION_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecx/face_detection.h"
#include "ecx/frame.h"
#include "ecx/tensor.h"

namespace ecx {

// Fixed label order; argmax ties resolve toward the front.
enum class Emotion {
  kAnger = 0,
  kDisgust,
  kFear,
  kJoy,
  kSadness,
  kSurprise,
  kNeutral,
};

inline constexpr std::size_t kEmotionCount = 7;

std::string_view EmotionName(Emotion e);
std::optional<Emotion> ParseEmotion(std::string_view name);
inline constexpr std::array<Emotion, kEmotionCount> kAllEmotions = {
    Emotion::kAnger,   Emotion::kDisgust,  Emotion::kFear,   Emotion::kJoy,
    Emotion::kSadness, Emotion::kSurprise, Emotion::kNeutral};

struct FaceCrop {
  std::vector<std::uint8_t> pixels;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::size_t source_frame = 0;
  Box source_box;
};

// Pixel rectangle [floor(x1), ceil(x2)) x [floor(y1), ceil(y2)) clamped to
// the frame. Throws InputError when the rectangle is empty.
FaceCrop CropFace(std::span<const std::uint8_t> frame, const FrameSpec& spec,
                  const Box& box, std::size_t frame_index);

// Face crop -> [Hf, Wf, Cf] feature map.
class MfnExtractor {
 public:
  virtual ~MfnExtractor() = default;
  virtual std::string name() const = 0;
  virtual Tensor Extract(const FaceCrop& crop) const = 0;
};

// Grayscale (channel mean, scaled to [0,1]) averaged over an Hf x Wf grid of
// blocks; block (i,j) spans rows [floor(i*H/Hf), floor((i+1)*H/Hf)) and the
// analogous columns, widened to one pixel when the crop is smaller than the
// grid. The value is replicated across Cf channels.
class GridMeanExtractor : public MfnExtractor {
 public:
  GridMeanExtractor(std::size_t rows, std::size_t cols, std::size_t channels);
  std::string name() const override { return "grid-mean"; }
  Tensor Extract(const FaceCrop& crop) const override;

 private:
  std::size_t rows_, cols_, channels_;
};

enum class Direction { kX, kY };

// Depthwise 1-D correlation of a [H, W, C] map along W (kX) or H (kY) with
// zero padding; output keeps the input shape. Every channel shares `kernel`,
// which must have odd length.
Tensor DdaAttention(const Tensor& f, Direction direction,
                    std::span<const double> kernel);

// max(fx, fy) * sigmoid(fx * fy), elementwise.
Tensor FuseAttention(const Tensor& fx, const Tensor& fy);

struct EmotionPrediction {
  Emotion label = Emotion::kNeutral;
  std::array<double, kEmotionCount> logits{};
  // Softmax probability of `label`.
  double confidence = 0;
};

// logits = flatten(f_att) * head + bias; head is [size(f_att) x 7].
EmotionPrediction ClassifyEmotion(const Tensor& f_att, const Tensor& head,
                                  const Tensor& bias);

// Weights for the stage-two recognizer.
struct EmotionModel {
  std::vector<double> kernel{0.25, 0.5, 0.25};
  Tensor head;
  Tensor bias;
};

// Feature extraction, both attention directions, fusion and classification.
EmotionPrediction RecognizeEmotion(const FaceCrop& crop,
                                   const MfnExtractor& extractor,
                                   const EmotionModel& model);

struct FacePrediction {
  std::size_t frame = 0;
  Box box;
  EmotionPrediction prediction;
};

struct VideoEmotionSummary {
  std::vector<FacePrediction> per_face;
  std::optional<Emotion> dominant;
  std::array<std::size_t, kEmotionCount> histogram{};

  std::string dominant_tag() const;
};

// dominant = non-neutral label with the largest summed confidence (label
// order breaks ties); empty when no non-neutral face exists.
VideoEmotionSummary SummarizeVideoEmotions(std::span<const FacePrediction> preds);

}  // namespace ecx

#endif  // ECX_FACIAL_EMOTION_H_
