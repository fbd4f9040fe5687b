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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../hand_corpus.h"
#include "../oracles/oracles.h"
#include "../test_support.h"
#include "ecx/container.h"
#include "ecx/dataset.h"
#include "ecx/errors.h"
#include "ecx/face_detection.h"
#include "ecx/facial_emotion.h"
#include "ecx/metrics.h"
#include "ecx/vision_language.h"
#include "json.hpp"

namespace ecx {
namespace {

using Clock = std::chrono::steady_clock;

// Collects the first few failure messages of a criterion.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string Summary() const {
    std::ostringstream out;
    out << checks_ << " checks";
    if (failures_) out << ", " << failures_ << " failed: " << messages_;
    return out.str();
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string messages_;
};

bool Near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string Str(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

// 1. (T+N) x K token shape for T in 1..8, N in {1,4,16}, D = K = 8.
void ShapeContract(Check& c) {
  PatchStatsEncoder encoder(8);
  const Tensor g = RandomProjection(8, 8, 42);
  for (std::size_t side : {16u, 32u, 64u}) {
    const FrameSpec spec{side, side, 3, 16};
    for (std::size_t t = 1; t <= 8; ++t) {
      Video v = testing::RandomVideo(spec, t, static_cast<unsigned>(side * 10 + t));
      const auto start = Clock::now();
      VideoTokens q = VideoToTokens(v.frames, spec, encoder, g);
      const double secs = std::chrono::duration<double>(Clock::now() - start).count();
      const std::string tag = "T=" + std::to_string(t) + " N=" + std::to_string(spec.patches());
      c.Expect(q.values.shape() == Shape{t + spec.patches(), 8}, tag + " shape " +
                                                                   ShapeString(q.values.shape()));
      c.Expect(secs < 1.0, tag + " took " + Str(secs) + "s");
    }
  }
}

Tensor PermuteAxis(const Tensor& x, std::size_t axis, const std::vector<std::size_t>& perm) {
  const std::size_t t = x.dim(0), n = x.dim(1), d = x.dim(2);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t si = axis == 0 ? perm[i] : i, sj = axis == 1 ? perm[j] : j;
      for (std::size_t k = 0; k < d; ++k) out[(i * n + j) * d + k] = x.at(si, sj, k);
    }
  }
  return Tensor(x.shape(), std::move(out));
}

// 2. Pooling equivariance under frame and patch permutations.
void PoolingEquivariance(Check& c) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t t = dim(rng), n = dim(rng), d = dim(rng);
    const Tensor x = testing::RandomTensor({t, n, d}, rng);
    const Tensor rt = TemporalPool(VideoEmbedding(x)), rs = SpatialPool(VideoEmbedding(x));
    for (std::size_t axis : {0u, 1u}) {
      std::vector<std::size_t> perm(x.dim(axis));
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      const VideoEmbedding px(PermuteAxis(x, axis, perm));
      // The pool over the permuted axis is fixed; the other pool's rows move.
      const Tensor moved = axis == 0 ? TemporalPool(px) : SpatialPool(px);
      const Tensor fixed = axis == 0 ? SpatialPool(px) : TemporalPool(px);
      const Tensor& base_moved = axis == 0 ? rt : rs;
      const Tensor& base_fixed = axis == 0 ? rs : rt;
      bool rows_ok = true, fixed_ok = true;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t k = 0; k < d; ++k) {
          rows_ok &= Near(moved.at(i, k), base_moved.at(perm[i], k), 1e-12);
        }
      }
      for (std::size_t i = 0; i < fixed.size(); ++i) {
        fixed_ok &= Near(fixed[i], base_fixed[i], 1e-12);
      }
      c.Expect(rows_ok, "trial " + std::to_string(trial) + " permuted rows");
      c.Expect(fixed_ok, "trial " + std::to_string(trial) + " fixed pool");
    }
    const Tensor global = MeanAxis(MeanAxis(x, 0), 0);
    const Tensor mt = MeanAxis(rt, 0), ms = MeanAxis(rs, 0);
    for (std::size_t k = 0; k < d; ++k) {
      c.Expect(Near(mt[k], global[k], 1e-9) && Near(ms[k], global[k], 1e-9),
               "trial " + std::to_string(trial) + " global mean");
    }
  }
}

// 3. NMS against the greedy oracle; IoU properties.
void NmsOracle(Check& c) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> count(0, 6);
  DetectorConfig cfg;
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dets = testing::RandomDetections(count(rng), rng);
    const auto kept = Nms(dets, cfg);
    const auto want = oracle::GreedyNmsIndices(dets, cfg.score_threshold, cfg.iou_threshold);
    bool same = kept.size() == want.size();
    for (std::size_t i = 0; same && i < kept.size(); ++i) {
      same = static_cast<std::size_t>(kept[i].deltas.dx) == want[i];
    }
    if (!same) ++mismatches;
  }
  c.Expect(mismatches == 0, std::to_string(mismatches) + " NMS mismatches");
  for (int trial = 0; trial < 10000; ++trial) {
    const Box a = testing::RandomBox(rng), b = testing::RandomBox(rng);
    const double ab = Iou(a, b);
    c.Expect(ab == Iou(b, a), "IoU asymmetric");
    c.Expect(Iou(a, a) == 1.0, "self IoU " + Str(Iou(a, a)));
    c.Expect(ab >= 0 && ab <= 1, "IoU out of range " + Str(ab));
  }
}

// 4. Attention fusion algebra and convolution oracle.
void AttentionAlgebra(Check& c) {
  std::mt19937 rng(4);
  std::uniform_int_distribution<std::size_t> dim(1, 5), ch(1, 2), half(0, 2);
  for (int trial = 0; trial < 1000; ++trial) {
    const Shape shape{dim(rng), dim(rng), ch(rng)};
    const Tensor fx = testing::RandomTensor(shape, rng, -4, 4);
    const Tensor fy = testing::RandomTensor(shape, rng, -4, 4);
    const Tensor f = FuseAttention(fx, fy);
    c.Expect(f == FuseAttention(fy, fx), "fusion not symmetric");
    bool bounded = true;
    for (std::size_t i = 0; i < f.size(); ++i) {
      bounded &= std::abs(f[i]) <= std::max(std::abs(fx[i]), std::abs(fy[i]));
    }
    c.Expect(bounded, "fusion magnitude bound");
  }
  const std::vector<double> delta{0, 1, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor f = testing::RandomTensor({dim(rng), dim(rng), ch(rng)}, rng);
    c.Expect(DdaAttention(f, Direction::kX, delta) == f, "delta kernel X");
    c.Expect(DdaAttention(f, Direction::kY, delta) == f, "delta kernel Y");
    std::vector<double> kernel(2 * half(rng) + 1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (double& w : kernel) w = u(rng);
    for (bool along_x : {true, false}) {
      const Tensor got = DdaAttention(f, along_x ? Direction::kX : Direction::kY, kernel);
      const Tensor want = oracle::Convolve(f, along_x, kernel);
      double worst = 0;
      for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
      c.Expect(worst <= 1e-9, "convolution off by " + Str(worst));
    }
  }
}

// 5. Metric oracles on the hand corpus; exhaustive ROUGE-L; perfect corpora.
void MetricOracles(Check& c) {
  std::vector<TokenSeq> cands;
  std::vector<std::vector<TokenSeq>> refs;
  std::vector<ScoredPair> perfect;
  for (std::size_t i = 0; i < testing::kHandCorpus.size(); ++i) {
    const auto& p = testing::kHandCorpus[i];
    const TokenSeq cand = Tokenize(p.candidate), ref = Tokenize(p.reference);
    const std::vector<TokenSeq> r{ref};
    const std::string id = "pair " + std::to_string(i);
    c.Expect(Near(Bleu4(cand, r), oracle::Bleu(cand, r), 1e-6), id + " bleu4");
    c.Expect(Near(RougeL(cand, ref), oracle::RougeL(cand, ref), 1e-6), id + " rouge_l");
    c.Expect(Near(MeteorLite(cand, ref), oracle::Meteor(cand, ref), 1e-6), id + " meteor");
    cands.push_back(cand);
    refs.push_back(r);
    perfect.push_back({"p" + std::to_string(i), std::string(p.reference), std::string(p.reference)});
  }
  c.Expect(Near(Cider(cands, refs), oracle::Cider(cands, refs), 1e-6), "corpus cider");

  std::vector<TokenSeq> seqs{{}};
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    if (seqs[i].size() == 6) continue;
    for (const char* s : {"x", "y", "z"}) {
      TokenSeq next = seqs[i];
      next.push_back(s);
      seqs.push_back(std::move(next));
    }
  }
  std::size_t rouge_mismatch = 0;
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      if (LcsLength(a, b) != oracle::LcsByEnumeration(a, b) ||
          !Near(RougeL(a, b), oracle::RougeL(a, b), 1e-12)) {
        ++rouge_mismatch;
      }
    }
  }
  c.Expect(rouge_mismatch == 0, std::to_string(rouge_mismatch) + " exhaustive ROUGE-L mismatches over " +
                                    std::to_string(seqs.size() * seqs.size()) + " pairs");

  std::vector<std::string> texts;
  for (const auto& p : perfect) texts.push_back(p.reference);
  OneHotEmbedder emb = OneHotEmbedder::FromTexts(texts);
  MetricReport report = ScoreCorpus(perfect, emb);
  c.Expect(report.corpus.bleu4 == 1.0, "perfect bleu4 " + Str(report.corpus.bleu4));
  c.Expect(report.corpus.rouge_l == 1.0, "perfect rouge_l " + Str(report.corpus.rouge_l));
  c.Expect(report.corpus.semantic == 1.0, "perfect semantic " + Str(report.corpus.semantic));
  for (const auto& s : report.per_sample) {
    c.Expect(s.bleu4 == 1.0 && s.rouge_l == 1.0 && s.semantic == 1.0, s.id + " not perfect");
  }

  const std::vector<TokenSeq> one{Tokenize("the cat sat")};
  const std::vector<std::vector<TokenSeq>> one_ref{{Tokenize("the cat sat")}};
  c.Expect(Cider(one, one_ref) == 0.0, "single-document CIDEr " + Str(Cider(one, one_ref)));
}

// 6. Strict 0.75 routing and 3-vote majority.
void AnnotationProtocol(Check& c) {
  const std::pair<double, Route> grid[] = {{0.70, Route::kDiscussion},
                                           {0.74, Route::kDiscussion},
                                           {0.75, Route::kDiscussion},
                                           {0.76, Route::kVote},
                                           {0.80, Route::kVote}};
  for (const auto& [score, route] : grid) {
    c.Expect(RouteForScore(score) == route, "score " + Str(score));
  }
  for (int pattern = 0; pattern < 8; ++pattern) {
    std::vector<Vote> votes;
    int for_a = 0;
    for (int bit = 0; bit < 3; ++bit) {
      const bool a = (pattern >> bit) & 1;
      for_a += a;
      votes.push_back(a ? Vote::kA : Vote::kB);
    }
    const std::string got = ResolveVote("A", "B", votes);
    c.Expect(got == (for_a >= 2 ? "A" : "B"), "pattern " + std::to_string(pattern));
  }
}

// 7. Cumulative clips worked example and hand-computed corpus statistics.
void DatasetFidelity(Check& c) {
  Conversation conv{"d", {{"U0", "A", "first", Emotion::kJoy, "u0.ftc", 0, 1},
                          {"U1", "B", "second", Emotion::kAnger, "u1.ftc", 1, 2}}, {}};
  const auto clips = CumulativeClips(conv);
  c.Expect(clips.size() == 2, "clip count");
  if (clips.size() == 2) {
    c.Expect(clips[0].utterance_ids == std::vector<std::string>{"U0"}, "clip (U0)");
    c.Expect(clips[1].utterance_ids == std::vector<std::string>{"U0", "U1"}, "clip (U0,U1)");
  }
  // Lengths: joy 4, 10, 16 -> min 4 max 16 mean 10; anger 7; fear 3, 4 -> 3.5.
  const auto words = [](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += "w ";
    return s;
  };
  const std::vector<CauseRecord> records{
      {Emotion::kJoy, words(4)},  {Emotion::kJoy, words(10)}, {Emotion::kJoy, words(16)},
      {Emotion::kAnger, words(7)}, {Emotion::kFear, words(3)}, {Emotion::kFear, words(4)}};
  const CorpusStats s = ComputeCorpusStats(records);
  c.Expect(s.instance_count == 6, "instance count");
  c.Expect(s.histogram == std::array<std::size_t, 6>{1, 0, 2, 3, 0, 0}, "histogram");
  const auto& joy = s.lengths[3];
  c.Expect(joy && joy->min == 4 && joy->max == 16 && joy->mean == 10.0, "joy lengths");
  const auto& anger = s.lengths[0];
  c.Expect(anger && anger->min == 7 && anger->max == 7 && anger->mean == 7.0, "anger lengths");
  const auto& fear = s.lengths[2];
  c.Expect(fear && fear->min == 3 && fear->max == 4 && fear->mean == 3.5, "fear lengths");
  c.Expect(s.overall && s.overall->mean == 44.0 / 6, "overall mean");
}

// 8. explain through the binary with stub components and the echo backend.
void EndToEnd(Check& c) {
  testing::TempDir dir;
  const std::string corpus = testing::WriteSyntheticCorpus(dir);
  const std::string cmd = std::string(ECX_BINARY) + " explain " + corpus +
                          " --conversation dia1 --seed 7";
  const auto start = Clock::now();
  const auto first = testing::RunCommand(cmd, dir);
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  const auto second = testing::RunCommand(cmd, dir);
  c.Expect(first.exit_code == 0, "exit code " + std::to_string(first.exit_code) + " " + first.err);
  c.Expect(secs < 5.0, "took " + Str(secs) + "s");
  std::string explanation;
  try {
    explanation = nlohmann::json::parse(first.out).at("explanation").get<std::string>();
  } catch (const std::exception& e) {
    c.Expect(false, std::string("unparseable output: ") + e.what());
  }
  c.Expect(!explanation.empty(), "empty explanation");
  c.Expect(first.out == second.out, "rerun differs");
}

// 9. Container round trip and distinct corruption codes.
void FormatRobustness(Check& c) {
  std::mt19937 rng(9);
  std::uniform_int_distribution<std::size_t> rank(1, 5), dim(1, 6);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int trial = 0; trial < 100; ++trial) {
    Shape shape(rank(rng));
    for (auto& d : shape) d = dim(rng);
    std::vector<double> data(ShapeElements(shape));
    for (double& v : data) {
      float f;
      do {
        f = std::bit_cast<float>(bits(rng));
      } while (std::isnan(f));
      v = f;
    }
    const Tensor t(shape, data);
    const auto bytes = EncodeTensor(t);
    const Tensor back = DecodeTensor(bytes);
    bool same = back.shape() == shape;
    for (std::size_t i = 0; same && i < data.size(); ++i) {
      same = std::bit_cast<std::uint64_t>(back[i]) == std::bit_cast<std::uint64_t>(data[i]);
    }
    c.Expect(same && EncodeTensor(back) == bytes, "round trip " + std::to_string(trial));
  }
  const auto good = EncodeTensor(Tensor({3, 2}));
  auto code_of = [](std::vector<std::uint8_t> bytes) -> int {
    try {
      DecodeTensor(bytes);
    } catch (const FormatError& e) {
      return static_cast<int>(e.code());
    }
    return 0;
  };
  auto bad_magic = good;
  bad_magic[1] = 'X';
  auto truncated = good;
  truncated.resize(good.size() - 3);
  auto big_rank = good;
  big_rank[4] = 9;
  const int a = code_of(bad_magic), b = code_of(truncated), r = code_of(big_rank);
  c.Expect(a == static_cast<int>(FormatErrorCode::kBadMagic), "bad magic code " + std::to_string(a));
  c.Expect(b == static_cast<int>(FormatErrorCode::kTruncated), "truncated code " + std::to_string(b));
  c.Expect(r == static_cast<int>(FormatErrorCode::kBadRank), "rank code " + std::to_string(r));
  c.Expect(a != b && b != r && a != r, "codes not distinct");
}

struct Criterion {
  int number;
  const char* name;
  std::function<void(Check&)> run;
};

}  // namespace
}  // namespace ecx

int main() {
  using namespace ecx;
  const Criterion criteria[] = {
      {1, "vision-language token shape contract", ShapeContract},
      {2, "pooling permutation equivariance", PoolingEquivariance},
      {3, "NMS oracle equivalence and IoU properties", NmsOracle},
      {4, "attention fusion algebra and convolution oracle", AttentionAlgebra},
      {5, "metric oracles", MetricOracles},
      {6, "annotation routing and majority vote", AnnotationProtocol},
      {7, "cumulative clips and corpus statistics", DatasetFidelity},
      {8, "end-to-end explain smoke", EndToEnd},
      {9, "tensor container round trip and corruption codes", FormatRobustness},
  };
  int failed = 0;
  for (const Criterion& crit : criteria) {
    Check check;
    const auto start = Clock::now();
    try {
      crit.run(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s criterion %d: %s (%s, %.2fs)\n", check.ok() ? "PASS" : "FAIL",
                crit.number, crit.name, check.Summary().c_str(), secs);
    if (!check.ok()) ++failed;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
