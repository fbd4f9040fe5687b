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

#include "ecx/dataset.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <unordered_set>

#include "ecx/errors.h"
#include "json.hpp"

namespace ecx {

using nlohmann::json;

std::string_view RouteName(Route r) {
  return r == Route::kVote ? "vote" : "discussion";
}

const Utterance* Conversation::find(std::string_view utterance_id) const {
  for (const Utterance& u : utterances) {
    if (u.id == utterance_id) return &u;
  }
  return nullptr;
}

void ValidateConversation(const Conversation& c) {
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < c.utterances.size(); ++i) {
    const Utterance& u = c.utterances[i];
    if (!ids.insert(u.id).second) {
      throw InputError("conversation '" + c.id + "' repeats utterance id '" +
                       u.id + "'");
    }
    if (!(u.end > u.start)) {
      throw InputError("utterance '" + u.id + "' must end after it starts");
    }
    if (i > 0 && u.start < c.utterances[i - 1].start) {
      throw InputError("utterance '" + u.id + "' starts before its predecessor");
    }
  }
  for (const AnnotationRecord& a : c.annotations) {
    const Utterance* u = c.find(a.utterance_id);
    if (!u) {
      throw InputError("annotation targets unknown utterance '" +
                       a.utterance_id + "'");
    }
    if (u->emotion == Emotion::kNeutral) {
      throw InputError("annotation targets neutral utterance '" +
                       a.utterance_id + "'");
    }
  }
}

std::vector<ClipSpec> CumulativeClips(const Conversation& c) {
  if (c.utterances.empty()) {
    throw InputError("conversation '" + c.id + "' has no utterances");
  }
  std::vector<ClipSpec> clips;
  ClipSpec running;
  running.conversation_id = c.id;
  running.start = c.utterances.front().start;
  for (std::size_t k = 0; k < c.utterances.size(); ++k) {
    const Utterance& u = c.utterances[k];
    running.index = k;
    running.utterance_ids.push_back(u.id);
    running.videos.push_back(u.video);
    running.end = k == 0 ? u.end : std::max(running.end, u.end);
    clips.push_back(running);
  }
  return clips;
}

double MeanAbsDifference(std::span<const std::uint8_t> a,
                         std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw ContractError("frame sizes differ");
  if (a.empty()) return 0.0;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += static_cast<std::uint64_t>(std::abs(int{a[i]} - int{b[i]}));
  }
  return static_cast<double>(total) / static_cast<double>(a.size());
}

std::vector<std::size_t> DedupFrameIndices(std::span<const Frame> frames,
                                           double threshold) {
  if (!(threshold >= 0)) throw ContractError("dedup threshold must be >= 0");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (kept.empty() ||
        MeanAbsDifference(frames[i], frames[kept.back()]) > threshold) {
      kept.push_back(i);
    }
  }
  return kept;
}

std::vector<Frame> DedupFrames(std::span<const Frame> frames, double threshold) {
  std::vector<Frame> out;
  for (std::size_t i : DedupFrameIndices(frames, threshold)) {
    out.push_back(frames[i]);
  }
  return out;
}

Route RouteForScore(double score) {
  return score > kAgreementThreshold ? Route::kVote : Route::kDiscussion;
}

GateResult AgreementGate(std::string_view a, std::string_view b,
                         const Embedder& embedder) {
  TokenSeq ta = Tokenize(a), tb = Tokenize(b);
  if (ta.empty() || tb.empty()) throw InputError("annotation text is empty");
  const double score = SemanticScore(ta, tb, embedder);
  return {score, RouteForScore(score)};
}

GateResult AgreementGate(std::string_view a, std::string_view b) {
  const std::array<std::string, 2> texts{std::string(a), std::string(b)};
  return AgreementGate(a, b, OneHotEmbedder::FromTexts(texts));
}

std::string ResolveVote(std::string_view a, std::string_view b,
                        std::span<const Vote> votes) {
  if (votes.size() != 3) {
    throw InputError("majority vote needs exactly 3 votes, got " +
                     std::to_string(votes.size()));
  }
  const auto for_a = std::count(votes.begin(), votes.end(), Vote::kA);
  return std::string(for_a >= 2 ? a : b);
}

CorpusStats ComputeCorpusStats(std::span<const CauseRecord> records) {
  CorpusStats stats;
  std::array<std::size_t, kAnnotatedEmotionCount> totals{};
  std::size_t grand_total = 0;
  for (const CauseRecord& r : records) {
    const auto idx = static_cast<std::size_t>(r.emotion);
    if (idx >= kAnnotatedEmotionCount) {
      throw InputError("record emotion '" + std::string(EmotionName(r.emotion)) +
                       "' is not one of the six annotated emotions");
    }
    const std::size_t words = Tokenize(r.cause).size();
    auto update = [words](std::optional<LengthStats>& slot) {
      if (!slot) {
        slot = LengthStats{words, words, 0};
      } else {
        slot->min = std::min(slot->min, words);
        slot->max = std::max(slot->max, words);
      }
    };
    update(stats.lengths[idx]);
    update(stats.overall);
    ++stats.histogram[idx];
    totals[idx] += words;
    grand_total += words;
    ++stats.instance_count;
  }
  for (std::size_t i = 0; i < kAnnotatedEmotionCount; ++i) {
    if (stats.lengths[i]) {
      stats.lengths[i]->mean = static_cast<double>(totals[i]) /
                               static_cast<double>(stats.histogram[i]);
    }
  }
  if (stats.overall) {
    stats.overall->mean = static_cast<double>(grand_total) /
                          static_cast<double>(stats.instance_count);
  }
  return stats;
}

std::vector<CauseRecord> CollectCauseRecords(
    std::span<const Conversation> corpus, std::size_t* unresolved) {
  std::vector<CauseRecord> out;
  std::size_t skipped = 0;
  for (const Conversation& c : corpus) {
    for (const AnnotationRecord& a : c.annotations) {
      const Utterance* u = c.find(a.utterance_id);
      if (!u) throw InputError("annotation targets unknown utterance");
      std::string cause = a.final;
      if (cause.empty() && a.votes &&
          AgreementGate(a.annotator_a, a.annotator_b).route == Route::kVote) {
        cause = ResolveVote(a.annotator_a, a.annotator_b, *a.votes);
      }
      if (cause.empty()) {
        ++skipped;
        continue;
      }
      out.push_back({u->emotion, std::move(cause)});
    }
  }
  if (unresolved) *unresolved = skipped;
  return out;
}

namespace {

std::string RequireString(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw InputError(std::string("missing string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

double RequireNumber(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw InputError(std::string("missing numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

}  // namespace

Conversation ParseConversationLine(std::string_view line, std::size_t line_no) {
  const std::string where = "corpus line " + std::to_string(line_no) + ": ";
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw InputError("expected a JSON object");
    Conversation c;
    c.id = RequireString(j, "id");
    if (!j.contains("utterances") || !j["utterances"].is_array()) {
      throw InputError("missing array field 'utterances'");
    }
    for (const json& ju : j["utterances"]) {
      Utterance u;
      u.id = RequireString(ju, "id");
      u.speaker = ju.value("speaker", "");
      u.text = RequireString(ju, "text");
      const std::string label = RequireString(ju, "emotion");
      auto emotion = ParseEmotion(label);
      if (!emotion) throw InputError("unknown emotion label '" + label + "'");
      u.emotion = *emotion;
      u.video = ju.value("video", "");
      u.start = RequireNumber(ju, "start");
      u.end = RequireNumber(ju, "end");
      c.utterances.push_back(std::move(u));
    }
    if (j.contains("annotations")) {
      if (!j["annotations"].is_array()) {
        throw InputError("'annotations' must be an array");
      }
      for (const json& ja : j["annotations"]) {
        AnnotationRecord a;
        a.utterance_id = RequireString(ja, "utterance_id");
        a.annotator_a = RequireString(ja, "annotator_a");
        a.annotator_b = RequireString(ja, "annotator_b");
        a.final = ja.value("final", "");
        if (ja.contains("votes")) {
          const json& jv = ja["votes"];
          if (!jv.is_array() || jv.size() != 3) {
            throw InputError("'votes' must hold exactly 3 entries");
          }
          std::array<Vote, 3> votes{};
          for (std::size_t i = 0; i < 3; ++i) {
            const std::string v = jv[i].is_string() ? jv[i].get<std::string>() : "";
            if (v != "a" && v != "b") {
              throw InputError("votes must be \"a\" or \"b\"");
            }
            votes[i] = v == "a" ? Vote::kA : Vote::kB;
          }
          a.votes = votes;
        }
        c.annotations.push_back(std::move(a));
      }
    }
    ValidateConversation(c);
    return c;
  } catch (const json::exception& e) {
    throw InputError(where + e.what());
  } catch (const InputError& e) {
    throw InputError(where + e.what());
  }
}

std::vector<Conversation> LoadCorpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus '" + path + "'");
  std::vector<Conversation> corpus;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Conversation c = ParseConversationLine(line, line_no);
    if (!ids.insert(c.id).second) {
      throw InputError("corpus line " + std::to_string(line_no) +
                       ": duplicate conversation id '" + c.id + "'");
    }
    corpus.push_back(std::move(c));
  }
  return corpus;
}

}  // namespace ecx
