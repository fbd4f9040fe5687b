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

#include "ecx/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <optional>

#include "ecx/container.h"
#include "ecx/errors.h"

namespace ecx {

using nlohmann::json;

Tensor BuildProjection(const RunConfig& config) {
  if (config.projection_path.empty()) {
    return RandomProjection(config.embed_dim, config.token_width, config.seed);
  }
  Tensor g = LoadTensor(config.projection_path);
  if (g.shape() != Shape{config.embed_dim, config.token_width}) {
    throw InputError("projection must be " +
                     ShapeString({config.embed_dim, config.token_width}) +
                     ", file holds " + ShapeString(g.shape()));
  }
  return g;
}

EmotionModel BuildEmotionModel(const RunConfig& config) {
  EmotionModel model;
  model.kernel = config.dda_kernel;
  const std::size_t flat =
      config.feature_h * config.feature_w * config.feature_channels;
  if (config.classifier_head_path.empty()) {
    model.head = SeededUniform({flat, kEmotionCount}, -0.1, 0.1, config.seed + 1);
    model.bias = SeededUniform({kEmotionCount}, -0.1, 0.1, config.seed + 2);
  } else {
    model.head = LoadTensor(config.classifier_head_path);
    model.bias = LoadTensor(config.classifier_bias_path);
    if (model.head.shape() != Shape{flat, kEmotionCount} ||
        model.bias.size() != kEmotionCount) {
      throw InputError("classifier weights must be " +
                       ShapeString({flat, kEmotionCount}) + " and [7]");
    }
  }
  return model;
}

VideoTokens FuseVideo(const Video& video, const RunConfig& config) {
  auto encoder = MakeFrameEncoder(config.encoder, config.embed_dim);
  return VideoToTokens(video.frames, video.spec, *encoder,
                       BuildProjection(config));
}

namespace {

std::unique_ptr<DetectionHead> MakeHead(const RunConfig& config) {
  if (config.detection_head == "constant") {
    return std::make_unique<ConstantHead>(config.constant_score);
  }
  return std::make_unique<CenterCellHead>(config.detector.anchor_stride);
}

std::string ResolvePath(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace

FaceAnalysis AnalyzeFaces(const Video& video, const RunConfig& config) {
  config.detector.Validate();
  PooledGrayExtractor features(config.detector.anchor_stride);
  auto head = MakeHead(config);
  GridMeanExtractor mfn(config.feature_h, config.feature_w,
                        config.feature_channels);
  const EmotionModel model = BuildEmotionModel(config);

  FaceAnalysis analysis;
  analysis.frames = video.frames.size();
  std::vector<FacePrediction> preds;
  for (std::size_t f = 0; f < video.frames.size(); ++f) {
    const Frame& frame = video.frames[f];
    if (frame.size() != video.spec.frame_bytes()) {
      throw InputError("frame " + std::to_string(f) + " has the wrong size");
    }
    Tensor fmap = features.Extract(frame, video.spec);
    auto anchors = GenerateAnchors(fmap.shape()[0], fmap.shape()[1], config.detector);
    DecodeResult decoded =
        DecodeBoxes(ScoreAnchors(fmap, anchors, *head), video.spec);
    analysis.dropped_boxes += decoded.dropped;
    for (const Detection& d : Nms(decoded.detections, config.detector)) {
      FaceCrop crop = CropFace(frame, video.spec, d.box, f);
      preds.push_back({f, d.box, RecognizeEmotion(crop, mfn, model)});
    }
  }
  analysis.summary = SummarizeVideoEmotions(preds);
  return analysis;
}

ClipVideo LoadClipVideo(const ClipSpec& clip, const std::string& base_dir,
                        const RunConfig& config) {
  ClipVideo out;
  bool have_spec = false;
  std::vector<Frame> frames;
  for (const std::string& ref : clip.videos) {
    if (ref.empty()) continue;
    Video v = LoadVideo(ResolvePath(base_dir, ref), config.patch);
    if (!have_spec) {
      out.video.spec = v.spec;
      have_spec = true;
    } else if (!(v.spec == out.video.spec)) {
      throw InputError("clip videos disagree on frame geometry: " + ref);
    }
    for (Frame& f : v.frames) frames.push_back(std::move(f));
  }
  if (!have_spec || frames.empty()) {
    throw InputError("clip " + std::to_string(clip.index) + " of conversation '" +
                     clip.conversation_id + "' has no frames");
  }
  out.total_frames = frames.size();
  out.video.frames = DedupFrames(frames, config.dedup_threshold);
  return out;
}

std::string BuildUserQuery(const Conversation& c, std::size_t target) {
  const Utterance& t = c.utterances.at(target);
  std::string query = "Dialogue history:";
  if (target == 0) query += " (none)";
  for (std::size_t i = 0; i < target; ++i) {
    const Utterance& u = c.utterances[i];
    query += "\n" + u.speaker + ": " + u.text;
  }
  query += "\nTarget utterance: " + t.speaker + ": " + t.text;
  query += "\nEmotion: " + std::string(EmotionName(t.emotion));
  return query;
}

ExplainOutcome ExplainUtterance(std::span<const Conversation> corpus,
                                const std::string& conversation_id,
                                std::optional<std::string> utterance_id,
                                const std::string& base_dir,
                                const RunConfig& config) {
  const Conversation* conv = nullptr;
  for (const Conversation& c : corpus) {
    if (c.id == conversation_id) conv = &c;
  }
  if (!conv) throw InputError("no conversation '" + conversation_id + "'");
  std::vector<ClipSpec> clips = CumulativeClips(*conv);
  std::size_t target = clips.size() - 1;
  if (utterance_id) {
    const auto it = std::find_if(
        conv->utterances.begin(), conv->utterances.end(),
        [&](const Utterance& u) { return u.id == *utterance_id; });
    if (it == conv->utterances.end()) {
      throw InputError("no utterance '" + *utterance_id + "' in '" +
                       conversation_id + "'");
    }
    target = static_cast<std::size_t>(it - conv->utterances.begin());
  }

  ClipVideo clip = LoadClipVideo(clips[target], base_dir, config);
  VideoTokens tokens = FuseVideo(clip.video, config);
  FaceAnalysis faces = AnalyzeFaces(clip.video, config);

  PromptBundle bundle;
  bundle.instruction = config.instruction.empty()
                           ? std::string(kDefaultInstruction)
                           : config.instruction;
  bundle.user_query = BuildUserQuery(*conv, target);
  bundle.video_tokens = tokens;
  bundle.emotion_tag = faces.summary.dominant_tag();

  BackendOptions options;
  options.endpoint = config.endpoint;
  if (!config.canned_reply.empty()) options.canned_reply = config.canned_reply;
  auto backend = MakeBackend(config.backend, options);

  ExplainOutcome out;
  out.conversation_id = conv->id;
  out.utterance_id = conv->utterances[target].id;
  out.emotion_tag = bundle.emotion_tag;
  out.token_rows = tokens.rows();
  out.token_width = tokens.width();
  out.total_frames = clip.total_frames;
  out.kept_frames = clip.video.frames.size();
  out.generation = GenerateExplanation(bundle, *backend, config.timeout);
  return out;
}

json ToJson(const FaceAnalysis& analysis) {
  const VideoEmotionSummary& s = analysis.summary;
  json histogram = json::object();
  for (Emotion e : kAllEmotions) {
    histogram[std::string(EmotionName(e))] =
        s.histogram[static_cast<std::size_t>(e)];
  }
  json faces = json::array();
  for (const FacePrediction& p : s.per_face) {
    faces.push_back({{"frame", p.frame},
                     {"box", {p.box.x1, p.box.y1, p.box.x2, p.box.y2}},
                     {"label", EmotionName(p.prediction.label)},
                     {"confidence", p.prediction.confidence},
                     {"logits", p.prediction.logits}});
  }
  return {{"dominant", s.dominant_tag()},
          {"histogram", histogram},
          {"per_face", faces},
          {"frames", analysis.frames},
          {"dropped_boxes", analysis.dropped_boxes}};
}

json ToJson(const ExplainOutcome& o, bool with_timing) {
  json j = {{"backend", o.generation.backend_id},
            {"conversation_id", o.conversation_id},
            {"utterance_id", o.utterance_id},
            {"emotion_tag", o.emotion_tag},
            {"explanation", o.generation.explanation},
            {"video_tokens", {o.token_rows, o.token_width}},
            {"frames", {{"total", o.total_frames}, {"kept", o.kept_frames}}}};
  if (with_timing) j["latency_ms"] = o.generation.latency_ms;
  return j;
}

json ToJson(const MetricReport& report) {
  json samples = json::array();
  for (const SampleScores& s : report.per_sample) {
    samples.push_back({{"id", s.id},
                       {"bleu4", s.bleu4},
                       {"rouge_l", s.rouge_l},
                       {"meteor_lite", s.meteor},
                       {"semantic", s.semantic}});
  }
  return {{"count", report.count},
          {"per_sample", samples},
          {"corpus",
           {{"bleu4", report.corpus.bleu4},
            {"rouge_l", report.corpus.rouge_l},
            {"meteor_lite", report.corpus.meteor},
            {"cider", report.corpus.cider},
            {"semantic", report.corpus.semantic}}}};
}

json ToJson(const CorpusStats& stats) {
  json histogram = json::object();
  json lengths = json::object();
  auto length_json = [](const LengthStats& l) {
    return json{{"min", l.min}, {"max", l.max}, {"mean", l.mean}};
  };
  for (std::size_t i = 0; i < kAnnotatedEmotionCount; ++i) {
    const std::string name(EmotionName(static_cast<Emotion>(i)));
    histogram[name] = stats.histogram[i];
    if (stats.lengths[i]) lengths[name] = length_json(*stats.lengths[i]);
  }
  json j = {{"instance_count", stats.instance_count},
            {"emotion_histogram", histogram},
            {"length_stats", lengths}};
  j["overall_length"] = stats.overall ? length_json(*stats.overall) : json(nullptr);
  return j;
}

json ToJson(std::span<const ClipSpec> clips) {
  json out = json::array();
  for (const ClipSpec& c : clips) {
    out.push_back({{"conversation_id", c.conversation_id},
                   {"index", c.index},
                   {"utterance_ids", c.utterance_ids},
                   {"videos", c.videos},
                   {"start", c.start},
                   {"end", c.end}});
  }
  return out;
}

}  // namespace ecx
