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

#include <random>

#include <gtest/gtest.h>

#include "ecx/errors.h"
#include "test_support.h"

namespace ecx {
namespace {

Utterance Utt(std::string id, double start, Emotion e = Emotion::kJoy) {
  return {id, "S", "text of " + id, e, id + ".ftc", start, start + 1.5};
}

Conversation Conv(std::size_t n) {
  Conversation c{"c", {}, {}};
  for (std::size_t i = 0; i < n; ++i) c.utterances.push_back(Utt("U" + std::to_string(i), i));
  return c;
}

TEST(CumulativeClipsTest, PaperWorkedExample) {
  auto clips = CumulativeClips(Conv(2));
  ASSERT_EQ(clips.size(), 2u);
  EXPECT_EQ(clips[0].utterance_ids, (std::vector<std::string>{"U0"}));
  EXPECT_EQ(clips[1].utterance_ids, (std::vector<std::string>{"U0", "U1"}));
  EXPECT_EQ(clips[1].videos, (std::vector<std::string>{"U0.ftc", "U1.ftc"}));
  EXPECT_EQ(clips[0].end, 1.5);
  EXPECT_EQ(clips[1].start, 0);
  EXPECT_EQ(clips[1].end, 2.5);
}

TEST(CumulativeClipsTest, SingletonAndLonger) {
  EXPECT_EQ(CumulativeClips(Conv(1)).size(), 1u);
  auto clips = CumulativeClips(Conv(4));
  ASSERT_EQ(clips.size(), 4u);
  EXPECT_EQ(clips.back().utterance_ids.size(), 4u);
  for (std::size_t k = 1; k < clips.size(); ++k) {
    EXPECT_EQ(clips[k].index, k);
    // Strict prefix growth.
    EXPECT_EQ(clips[k].utterance_ids.size(), clips[k - 1].utterance_ids.size() + 1);
    EXPECT_TRUE(std::equal(clips[k - 1].utterance_ids.begin(), clips[k - 1].utterance_ids.end(),
                           clips[k].utterance_ids.begin()));
  }
  EXPECT_THROW(CumulativeClips(Conv(0)), InputError);
}

TEST(ValidateConversationTest, Invariants) {
  Conversation c = Conv(2);
  EXPECT_NO_THROW(ValidateConversation(c));
  c.utterances[1].id = "U0";
  EXPECT_THROW(ValidateConversation(c), InputError);
  c = Conv(2);
  c.utterances[1].start = -1;
  EXPECT_THROW(ValidateConversation(c), InputError);
  c = Conv(2);
  c.utterances[0].end = c.utterances[0].start;
  EXPECT_THROW(ValidateConversation(c), InputError);
  c = Conv(2);
  c.utterances[0].emotion = Emotion::kNeutral;
  c.annotations.push_back({"U0", "a", "b", {}, {}, {}, ""});
  EXPECT_THROW(ValidateConversation(c), InputError);
}

TEST(DedupTest, HandCases) {
  std::vector<Frame> same(4, Frame{9, 9, 9});
  EXPECT_EQ(DedupFrames(same, 0).size(), 1u);
  std::vector<Frame> distinct{{0, 0}, {0, 1}, {0, 2}};
  EXPECT_EQ(DedupFrames(distinct, 0).size(), 3u);
  EXPECT_TRUE(DedupFrames({}, 1.0).empty());
  EXPECT_THROW(DedupFrameIndices(distinct, -1), ContractError);
}

TEST(DedupTest, StraddlingThresholdMatchesPairwiseOracle) {
  // Diffs to frame 0: f1 = 0.5 (<= 1, dropped), f2 = 1.5 (> 1, kept).
  std::vector<Frame> frames{{0, 0, 0, 0}, {1, 1, 0, 0}, {2, 2, 2, 0}};
  auto oracle_diff = [](const Frame& a, const Frame& b) {
    double total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(double(a[i]) - double(b[i]));
    return total / static_cast<double>(a.size());
  };
  std::vector<std::size_t> expected{0};
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (oracle_diff(frames[i], frames[expected.back()]) > 1.0) expected.push_back(i);
  }
  EXPECT_EQ(expected, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(DedupFrameIndices(frames, 1.0), expected);
  EXPECT_DOUBLE_EQ(MeanAbsDifference(frames[0], frames[2]), 1.5);
}

TEST(DedupProperty, Idempotent) {
  std::mt19937 rng(6);
  std::uniform_int_distribution<int> px(0, 3), len(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Frame> frames(static_cast<std::size_t>(len(rng)), Frame(6));
    for (auto& f : frames) {
      for (auto& b : f) b = static_cast<std::uint8_t>(px(rng));
    }
    auto once = DedupFrames(frames, 1.0);
    EXPECT_EQ(DedupFrames(once, 1.0), once);
  }
}

TEST(AgreementGateTest, HandCases) {
  GateResult same = AgreementGate("He lost the tickets.", "he lost the tickets");
  EXPECT_DOUBLE_EQ(same.score, 1.0);
  EXPECT_EQ(same.route, Route::kVote);
  GateResult disjoint = AgreementGate("cold rain", "happy dog");
  EXPECT_EQ(disjoint.score, 0.0);
  EXPECT_EQ(disjoint.route, Route::kDiscussion);
  GateResult partial = AgreementGate("a b c", "a b d");
  EXPECT_NEAR(partial.score, 2.0 / 3, 1e-12);
  EXPECT_EQ(partial.route, Route::kDiscussion);
  EXPECT_THROW(AgreementGate("", "x"), InputError);
  EXPECT_THROW(AgreementGate("x", " ... "), InputError);
}

TEST(RouteForScoreTest, StrictBoundary) {
  EXPECT_EQ(RouteForScore(0.70), Route::kDiscussion);
  EXPECT_EQ(RouteForScore(0.74), Route::kDiscussion);
  EXPECT_EQ(RouteForScore(0.75), Route::kDiscussion);
  EXPECT_EQ(RouteForScore(0.76), Route::kVote);
  EXPECT_EQ(RouteForScore(0.80), Route::kVote);
  EXPECT_EQ(RouteForScore(std::nextafter(0.75, 1.0)), Route::kVote);
  EXPECT_EQ(RouteName(Route::kVote), "vote");
  EXPECT_EQ(RouteName(Route::kDiscussion), "discussion");
}

TEST(ResolveVoteTest, MajorityRule) {
  using enum Vote;
  EXPECT_EQ(ResolveVote("a", "b", std::vector<Vote>{kA, kA, kB}), "a");
  EXPECT_EQ(ResolveVote("a", "b", std::vector<Vote>{kB, kB, kB}), "b");
  EXPECT_EQ(ResolveVote("a", "b", std::vector<Vote>{kA, kB, kA}), "a");
  EXPECT_THROW(ResolveVote("a", "b", std::vector<Vote>{kA, kB}), InputError);
  EXPECT_THROW(ResolveVote("a", "b", std::vector<Vote>{kA, kB, kA, kB}), InputError);
}

TEST(CorpusStatsTest, HandCases) {
  std::vector<CauseRecord> one{{Emotion::kFear, "He heard a loud noise."}};
  CorpusStats s = ComputeCorpusStats(one);
  ASSERT_TRUE(s.lengths[2].has_value());
  EXPECT_EQ(s.lengths[2]->min, 5u);
  EXPECT_EQ(s.lengths[2]->max, 5u);
  EXPECT_EQ(s.lengths[2]->mean, 5.0);
  EXPECT_EQ(s.instance_count, 1u);

  std::vector<CauseRecord> two{{Emotion::kJoy, "w w w w w w w w w w"},
                               {Emotion::kJoy, "w w w w w w w w w w w w w w w w w w w w"}};
  s = ComputeCorpusStats(two);
  EXPECT_EQ(s.lengths[3]->mean, 15.0);
  EXPECT_EQ(s.lengths[3]->min, 10u);
  EXPECT_EQ(s.lengths[3]->max, 20u);
  EXPECT_FALSE(s.lengths[0].has_value());

  std::vector<CauseRecord> six;
  for (std::size_t i = 0; i < kAnnotatedEmotionCount; ++i) {
    six.push_back({kAllEmotions[i], "x"});
  }
  s = ComputeCorpusStats(six);
  for (std::size_t c : s.histogram) EXPECT_EQ(c, 1u);

  std::vector<CauseRecord> neutral{{Emotion::kNeutral, "x"}};
  EXPECT_THROW(ComputeCorpusStats(neutral), InputError);
}

TEST(CorpusStatsProperty, HistogramTotalsAndMeanBounds) {
  std::mt19937 rng(10);
  std::uniform_int_distribution<int> label(0, 5), words(1, 30), count(0, 40);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CauseRecord> records;
    for (int i = count(rng); i > 0; --i) {
      std::string cause;
      for (int w = words(rng); w > 0; --w) cause += "word ";
      records.push_back({static_cast<Emotion>(label(rng)), cause});
    }
    CorpusStats s = ComputeCorpusStats(records);
    std::size_t total = 0;
    for (std::size_t c : s.histogram) total += c;
    EXPECT_EQ(total, records.size());
    EXPECT_EQ(s.instance_count, records.size());
    for (const auto& l : s.lengths) {
      if (!l) continue;
      EXPECT_LE(l->min, l->mean);
      EXPECT_LE(l->mean, l->max);
    }
  }
}

TEST(ParseConversationTest, FullRecord) {
  Conversation c = ParseConversationLine(
      R"({"id":"d1","utterances":[{"id":"u0","speaker":"A","text":"hi","emotion":"joy","video":"v.ftc","start":0,"end":1}],)"
      R"("annotations":[{"utterance_id":"u0","annotator_a":"x","annotator_b":"y","votes":["a","b","b"],"final":"y"}]})",
      1);
  EXPECT_EQ(c.id, "d1");
  ASSERT_EQ(c.utterances.size(), 1u);
  EXPECT_EQ(c.utterances[0].emotion, Emotion::kJoy);
  EXPECT_EQ(c.utterances[0].video, "v.ftc");
  ASSERT_EQ(c.annotations.size(), 1u);
  ASSERT_TRUE(c.annotations[0].votes.has_value());
  EXPECT_EQ((*c.annotations[0].votes)[2], Vote::kB);
  EXPECT_EQ(c.annotations[0].final, "y");
}

TEST(ParseConversationTest, ErrorsNameTheLine) {
  auto expect_error = [](std::string_view line, std::string_view fragment) {
    try {
      ParseConversationLine(line, 7);
      FAIL() << line;
    } catch (const InputError& e) {
      const std::string what = e.what();
      EXPECT_EQ(what.rfind("corpus line 7: ", 0), 0u) << what;
      EXPECT_NE(what.find(fragment), std::string::npos) << what;
    }
  };
  expect_error("{not json", "parse");
  expect_error(R"({"utterances":[]})", "'id'");
  expect_error(R"({"id":"d","utterances":[{"id":"u","text":"t","emotion":"happy","start":0,"end":1}]})",
               "happy");
  expect_error(R"({"id":"d","utterances":[{"id":"u","text":"t","emotion":"joy","start":0,"end":1}],)"
               R"("annotations":[{"utterance_id":"u","annotator_a":"x","annotator_b":"y","votes":["a","c","a"]}]})",
               "votes");
}

TEST(LoadCorpusTest, FileRoundTripAndDuplicates) {
  testing::TempDir dir;
  const std::string path = testing::WriteSyntheticCorpus(dir);
  auto corpus = LoadCorpus(path);
  ASSERT_EQ(corpus.size(), 1u);
  EXPECT_EQ(corpus[0].utterances.size(), 2u);

  std::size_t unresolved = 99;
  auto records = CollectCauseRecords(corpus, &unresolved);
  EXPECT_EQ(unresolved, 0u);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].emotion, Emotion::kSurprise);

  const std::string line = testing::ReadText(path);
  testing::WriteText(dir.file("dup.jsonl"), line + "\n" + line);
  EXPECT_THROW(LoadCorpus(dir.file("dup.jsonl")), InputError);
  EXPECT_THROW(LoadCorpus(dir.file("missing.jsonl")), InputError);
}

TEST(CollectCauseRecordsTest, DiscussionWithoutFinalIsUnresolved) {
  Conversation c = Conv(1);
  c.annotations.push_back({"U0", "cold rain", "happy dog", {}, {}, std::array{Vote::kA, Vote::kA, Vote::kB}, ""});
  c.annotations.push_back({"U0", "same text", "same text", {}, {}, std::array{Vote::kB, Vote::kB, Vote::kA}, ""});
  std::vector<Conversation> corpus{c};
  std::size_t unresolved = 0;
  auto records = CollectCauseRecords(corpus, &unresolved);
  EXPECT_EQ(unresolved, 1u);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].cause, "same text");
}

}  // namespace
}  // namespace ecx
