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

#ifndef ECX_PIPELINE_H_
#define ECX_PIPELINE_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "ecx/config.h"
#include "ecx/dataset.h"
#include "ecx/face_detection.h"
#include "ecx/facial_emotion.h"
#include "ecx/metrics.h"
#include "ecx/prompt.h"
#include "ecx/vision_language.h"
#include "json.hpp"

namespace ecx {

// Projection g, loaded from config.projection_path or drawn from the seed.
Tensor BuildProjection(const RunConfig& config);

// Classifier weights, loaded from the configured files or drawn from
// seed + 1 (head) and seed + 2 (bias).
EmotionModel BuildEmotionModel(const RunConfig& config);

VideoTokens FuseVideo(const Video& video, const RunConfig& config);

struct FaceAnalysis {
  VideoEmotionSummary summary;
  std::size_t frames = 0;
  std::size_t dropped_boxes = 0;
};

// Detection, cropping and emotion recognition on every frame.
FaceAnalysis AnalyzeFaces(const Video& video, const RunConfig& config);

// Frames of clip `clip` (utterances 0..clip.index) concatenated in order,
// then deduplicated. Video paths resolve against `base_dir`.
struct ClipVideo {
  Video video;
  std::size_t total_frames = 0;
};
ClipVideo LoadClipVideo(const ClipSpec& clip, const std::string& base_dir,
                        const RunConfig& config);

// Dialogue history, target utterance and its emotion.
std::string BuildUserQuery(const Conversation& c, std::size_t target);

struct ExplainOutcome {
  std::string conversation_id;
  std::string utterance_id;
  std::string emotion_tag;
  std::size_t token_rows = 0;
  std::size_t token_width = 0;
  std::size_t total_frames = 0;
  std::size_t kept_frames = 0;
  GenerationResult generation;
};

// fuse -> faces -> prompt -> generate for utterance `target` (defaults to
// the last one) of `conversation_id`.
ExplainOutcome ExplainUtterance(std::span<const Conversation> corpus,
                                const std::string& conversation_id,
                                std::optional<std::string> utterance_id,
                                const std::string& base_dir,
                                const RunConfig& config);

// JSON views. Object keys are sorted by nlohmann::json.
nlohmann::json ToJson(const FaceAnalysis& analysis);
nlohmann::json ToJson(const ExplainOutcome& outcome, bool with_timing);
nlohmann::json ToJson(const MetricReport& report);
nlohmann::json ToJson(const CorpusStats& stats);
nlohmann::json ToJson(std::span<const ClipSpec> clips);

}  // namespace ecx

#endif  // ECX_PIPELINE_H_
