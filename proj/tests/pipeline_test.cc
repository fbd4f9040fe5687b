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

#include <gtest/gtest.h>

#include "ecx/container.h"
#include "ecx/errors.h"
#include "test_support.h"

namespace ecx {
namespace {

TEST(FuseVideoTest, TokenShape) {
  RunConfig config;
  Video v = testing::RandomVideo({32, 64, 3, 16}, 5, 3);
  VideoTokens q = FuseVideo(v, config);
  EXPECT_EQ(q.rows(), 5u + 8u);
  EXPECT_EQ(q.width(), config.token_width);
}

TEST(BuildProjectionTest, SeededOrFromFile) {
  RunConfig config;
  Tensor g = BuildProjection(config);
  EXPECT_EQ(g.shape(), (Shape{8, 8}));
  EXPECT_EQ(g, BuildProjection(config));
  config.seed = 43;
  EXPECT_NE(g, BuildProjection(config));

  testing::TempDir dir;
  config.projection_path = dir.file("g.ftc");
  SaveTensor(config.projection_path, Tensor::Identity(8));
  EXPECT_EQ(BuildProjection(config), Tensor::Identity(8));
  SaveTensor(config.projection_path, Tensor::Identity(4));
  EXPECT_THROW(BuildProjection(config), InputError);
}

TEST(BuildEmotionModelTest, ShapesAndFileOverride) {
  RunConfig config;
  EmotionModel m = BuildEmotionModel(config);
  EXPECT_EQ(m.head.shape(), (Shape{7 * 7 * 4, 7}));
  EXPECT_EQ(m.bias.size(), 7u);

  testing::TempDir dir;
  config.classifier_head_path = dir.file("h.ftc");
  config.classifier_bias_path = dir.file("b.ftc");
  SaveTensor(config.classifier_head_path, Tensor({196, 7}));
  SaveTensor(config.classifier_bias_path, Tensor({7}, {0, 0, 0, 0, 0, 1, 0}));
  m = BuildEmotionModel(config);
  EXPECT_EQ(m.bias[5], 1);
}

TEST(AnalyzeFacesTest, BiasForcedLabelsAndHistogram) {
  RunConfig config;
  config.detection_head = "constant";
  testing::TempDir dir;
  config.classifier_head_path = dir.file("h.ftc");
  config.classifier_bias_path = dir.file("b.ftc");
  SaveTensor(config.classifier_head_path, Tensor({196, 7}));
  SaveTensor(config.classifier_bias_path, Tensor({7}, {0, 0, 0, 0, 0, 1, 0}));

  Video v = testing::RandomVideo({32, 32, 3, 16}, 2, 4);
  FaceAnalysis a = AnalyzeFaces(v, config);
  EXPECT_EQ(a.frames, 2u);
  ASSERT_FALSE(a.summary.per_face.empty());
  EXPECT_EQ(a.summary.dominant_tag(), "surprise");
  EXPECT_EQ(a.summary.histogram[5], a.summary.per_face.size());
  nlohmann::json j = ToJson(a);
  EXPECT_EQ(j["dominant"], "surprise");
  EXPECT_EQ(j["histogram"]["surprise"], a.summary.per_face.size());
}

TEST(AnalyzeFacesTest, DarkVideoHasNoFaces) {
  RunConfig config;
  Video v{{32, 32, 3, 16}, {Frame(32 * 32 * 3, 0)}};
  FaceAnalysis a = AnalyzeFaces(v, config);
  EXPECT_TRUE(a.summary.per_face.empty());
  EXPECT_EQ(a.summary.dominant_tag(), "none");
}

TEST(BuildUserQueryTest, Layout) {
  Conversation c{"d", {{"u0", "Ross", "Hi.", Emotion::kJoy, "", 0, 1},
                       {"u1", "Rachel", "What?", Emotion::kSurprise, "", 1, 2}}, {}};
  EXPECT_EQ(BuildUserQuery(c, 0),
            "Dialogue history: (none)\nTarget utterance: Ross: Hi.\nEmotion: joy");
  EXPECT_EQ(BuildUserQuery(c, 1),
            "Dialogue history:\nRoss: Hi.\nTarget utterance: Rachel: What?\nEmotion: surprise");
}

TEST(LoadClipVideoTest, ConcatenatesAndDedups) {
  testing::TempDir dir;
  auto corpus = LoadCorpus(testing::WriteSyntheticCorpus(dir));
  auto clips = CumulativeClips(corpus[0]);
  RunConfig config;
  ClipVideo first = LoadClipVideo(clips[0], dir.path().string(), config);
  EXPECT_EQ(first.total_frames, 3u);
  EXPECT_EQ(first.video.frames.size(), 3u);
  ClipVideo both = LoadClipVideo(clips[1], dir.path().string(), config);
  EXPECT_EQ(both.total_frames, 6u);
  EXPECT_EQ(both.video.frames.size(), 5u);
  EXPECT_THROW(LoadClipVideo(clips[0], "/nonexistent", config), FormatError);
}

TEST(ExplainUtteranceTest, EchoBackendEndToEnd) {
  testing::TempDir dir;
  auto corpus = LoadCorpus(testing::WriteSyntheticCorpus(dir));
  RunConfig config;
  ExplainOutcome o = ExplainUtterance(corpus, "dia1", std::nullopt, dir.path().string(), config);
  EXPECT_EQ(o.utterance_id, "u1");
  EXPECT_EQ(o.generation.explanation, BuildUserQuery(corpus[0], 1));
  EXPECT_EQ(o.token_rows, 5u + 4u);
  EXPECT_EQ(o.token_width, 8u);
  EXPECT_EQ(o.kept_frames, 5u);

  ExplainOutcome again = ExplainUtterance(corpus, "dia1", std::nullopt, dir.path().string(), config);
  EXPECT_EQ(ToJson(o, false).dump(), ToJson(again, false).dump());
  EXPECT_FALSE(ToJson(o, false).contains("latency_ms"));
  EXPECT_TRUE(ToJson(o, true).contains("latency_ms"));

  ExplainOutcome first = ExplainUtterance(corpus, "dia1", "u0", dir.path().string(), config);
  EXPECT_EQ(first.token_rows, 3u + 4u);

  EXPECT_THROW(ExplainUtterance(corpus, "nope", std::nullopt, "", config), InputError);
  EXPECT_THROW(ExplainUtterance(corpus, "dia1", "u9", dir.path().string(), config),
               InputError);
  config.backend = "fault";
  EXPECT_THROW(ExplainUtterance(corpus, "dia1", std::nullopt, dir.path().string(), config),
               BackendError);
}

TEST(ToJsonTest, StatsAndClips) {
  std::vector<CauseRecord> records{{Emotion::kAnger, "a b c"}, {Emotion::kAnger, "a"}};
  nlohmann::json j = ToJson(ComputeCorpusStats(records));
  EXPECT_EQ(j["instance_count"], 2);
  EXPECT_EQ(j["emotion_histogram"]["anger"], 2);
  EXPECT_EQ(j["length_stats"]["anger"]["mean"], 2.0);
  EXPECT_FALSE(j["length_stats"].contains("joy"));
  EXPECT_EQ(j["overall_length"]["max"], 3);
}

}  // namespace
}  // namespace ecx
