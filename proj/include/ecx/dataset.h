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

#ifndef ECX_DATASET_H_
#define ECX_DATASET_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecx/facial_emotion.h"
#include "ecx/frame.h"
#include "ecx/metrics.h"

namespace ecx {

struct Utterance {
  std::string id;
  std::string speaker;
  std::string text;
  Emotion emotion = Emotion::kNeutral;
  // Frame container path, relative to the corpus file.
  std::string video;
  double start = 0;
  double end = 0;
};

enum class Route { kVote, kDiscussion };
enum class Vote { kA, kB };

std::string_view RouteName(Route r);

struct AnnotationRecord {
  std::string utterance_id;
  std::string annotator_a;
  std::string annotator_b;
  std::optional<double> agreement;
  std::optional<Route> route;
  std::optional<std::array<Vote, 3>> votes;
  std::string final;
};

struct Conversation {
  std::string id;
  std::vector<Utterance> utterances;
  std::vector<AnnotationRecord> annotations;

  const Utterance* find(std::string_view utterance_id) const;
};

// Throws InputError on duplicate utterance ids, end <= start, starts out of
// order, or an annotation whose target is missing or neutral.
void ValidateConversation(const Conversation& c);

// ---- Clips -----------------------------------------------------------------

struct ClipSpec {
  std::string conversation_id;
  // Clip k covers utterances 0..k inclusive.
  std::size_t index = 0;
  std::vector<std::string> utterance_ids;
  std::vector<std::string> videos;
  double start = 0;
  double end = 0;
};

std::vector<ClipSpec> CumulativeClips(const Conversation& c);

// ---- Duplicate frames ------------------------------------------------------

inline constexpr double kDefaultDedupThreshold = 1.0;

double MeanAbsDifference(std::span<const std::uint8_t> a,
                         std::span<const std::uint8_t> b);

// Indices of kept frames: frame 0, then every frame whose mean absolute
// difference to the last kept frame exceeds `threshold`.
std::vector<std::size_t> DedupFrameIndices(std::span<const Frame> frames,
                                           double threshold);
std::vector<Frame> DedupFrames(std::span<const Frame> frames, double threshold);

// ---- Annotation protocol ---------------------------------------------------

inline constexpr double kAgreementThreshold = 0.75;

// Vote only when the score strictly exceeds the threshold.
Route RouteForScore(double score);

struct GateResult {
  double score = 0;
  Route route = Route::kDiscussion;
};

// Semantic score of the two annotations. Throws InputError if either is
// empty.
GateResult AgreementGate(std::string_view a, std::string_view b,
                         const Embedder& embedder);
// Same, with a one-hot embedder over the two texts.
GateResult AgreementGate(std::string_view a, std::string_view b);

// Majority of exactly three votes over candidates a and b.
std::string ResolveVote(std::string_view a, std::string_view b,
                        std::span<const Vote> votes);

// ---- Statistics ------------------------------------------------------------

inline constexpr std::size_t kAnnotatedEmotionCount = 6;

struct CauseRecord {
  Emotion emotion;
  std::string cause;
};

struct LengthStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0;
};

struct CorpusStats {
  std::array<std::size_t, kAnnotatedEmotionCount> histogram{};
  // Empty for emotions with no records.
  std::array<std::optional<LengthStats>, kAnnotatedEmotionCount> lengths{};
  std::size_t instance_count = 0;
  std::optional<LengthStats> overall;
};

// Word counts use Tokenize. Throws InputError for neutral records.
CorpusStats ComputeCorpusStats(std::span<const CauseRecord> records);

// Records for every annotation with a final cause, resolving votes when
// the final text is absent. Unresolvable annotations are counted in
// `unresolved`.
std::vector<CauseRecord> CollectCauseRecords(
    std::span<const Conversation> corpus, std::size_t* unresolved);

// ---- Corpus files ----------------------------------------------------------

// One conversation per JSON line:
// {"id", "utterances": [{"id","speaker","text","emotion","video","start","end"}],
//  "annotations": [{"utterance_id","annotator_a","annotator_b",
//                   "votes": ["a","b","a"], "final"}]}
// Errors name the 1-based line number.
Conversation ParseConversationLine(std::string_view line, std::size_t line_no);
std::vector<Conversation> LoadCorpus(const std::string& path);

}  // namespace ecx

#endif  // ECX_DATASET_H_
