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

#ifndef ECX_METRICS_H_
#define ECX_METRICS_H_

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ecx {

using TokenSeq = std::vector<std::string>;

// Lowercases ASCII letters, splits on Unicode whitespace and strips leading
// and trailing ASCII punctuation from every token. Empty tokens are dropped.
TokenSeq Tokenize(std::string_view text);

// ---- BLEU-4 ---------------------------------------------------------------

// Clipped n-gram counts for n = 1..4 plus the lengths entering the brevity
// penalty. Sums of these give corpus-level BLEU.
struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

// reference_length is the reference length closest to the candidate
// (shorter wins on ties).
BleuStats ComputeBleuStats(const TokenSeq& candidate,
                           std::span<const TokenSeq> references);

// Geometric mean of the four precisions times the brevity penalty. When any
// order has zero matches, orders 2..4 use (m + 1) / (t + 1); a zero unigram
// match count still yields 0.
double BleuFromStats(const BleuStats& stats);

double Bleu4(const TokenSeq& candidate, std::span<const TokenSeq> references);

// ---- ROUGE-L / METEOR-lite -----------------------------------------------

std::size_t LcsLength(const TokenSeq& a, const TokenSeq& b);
double RougeL(const TokenSeq& candidate, const TokenSeq& reference);

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

// Exact-match alignment with the most matches and, among those, the fewest
// chunks. Exhaustive search with memoization.
MeteorAlignment AlignExact(const TokenSeq& candidate, const TokenSeq& reference);

// Fmean = 10PR / (R + 9P), penalty = 0.5 * (chunks / matches)^3.
double MeteorLite(const TokenSeq& candidate, const TokenSeq& reference);

// ---- CIDEr ----------------------------------------------------------------

// Per-candidate CIDEr (no length penalty), times 10. idf uses document
// frequencies over the reference sets: log(|docs| / max(1, df)).
std::vector<double> CiderScores(std::span<const TokenSeq> candidates,
                                std::span<const std::vector<TokenSeq>> references);
// Mean of CiderScores.
double Cider(std::span<const TokenSeq> candidates,
             std::span<const std::vector<TokenSeq>> references);

// ---- Embedding score -------------------------------------------------------

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  // Unit-norm vector of width dim().
  virtual std::vector<double> Embed(std::string_view token) const = 0;
};

// One dimension per vocabulary entry plus a shared out-of-vocabulary slot.
class OneHotEmbedder : public Embedder {
 public:
  explicit OneHotEmbedder(std::span<const std::string> vocabulary);
  // Vocabulary of every token that appears in `texts`.
  static OneHotEmbedder FromTexts(std::span<const std::string> texts);

  std::string name() const override { return "one-hot"; }
  std::size_t dim() const override { return index_.size() + 1; }
  std::vector<double> Embed(std::string_view token) const override;

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// Greedy-matching F1 of token cosines, clamped to [0,1]. 0 if either side
// is empty.
double SemanticScore(const TokenSeq& candidate, const TokenSeq& reference,
                     const Embedder& embedder);

// ---- Corpus reports --------------------------------------------------------

struct ScoredPair {
  std::string id;
  std::string candidate;
  std::string reference;
};

struct SampleScores {
  std::string id;
  double bleu4 = 0;
  double rouge_l = 0;
  double meteor = 0;
  double semantic = 0;
};

struct CorpusScores {
  double bleu4 = 0;
  double rouge_l = 0;
  double meteor = 0;
  double cider = 0;
  double semantic = 0;
};

struct MetricReport {
  std::vector<SampleScores> per_sample;
  CorpusScores corpus;
  std::size_t count = 0;
};

// Corpus BLEU pools n-gram statistics; CIDEr is corpus-level; ROUGE-L,
// METEOR-lite and the semantic score are macro-averaged. Throws InputError
// on empty input or duplicate ids.
MetricReport ScoreCorpus(std::span<const ScoredPair> pairs,
                         const Embedder& embedder);

std::unique_ptr<Embedder> MakeEmbedder(std::string_view name,
                                       std::span<const std::string> texts);

}  // namespace ecx

#endif  // ECX_METRICS_H_
