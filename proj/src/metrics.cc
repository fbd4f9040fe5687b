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

#include "ecx/metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "ecx/errors.h"

namespace ecx {

namespace {

// Decodes one UTF-8 code point at `pos`; malformed bytes decode as
// themselves with length 1.
std::pair<char32_t, std::size_t> DecodeUtf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) {
    return pos + i < s.size() &&
           (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t i) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) & 0x3F);
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    return {(static_cast<char32_t>(b0 & 0x1F) << 6) | bits(1), 2};
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    return {(static_cast<char32_t>(b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2), 3};
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    return {(static_cast<char32_t>(b0 & 0x07) << 18) | (bits(1) << 12) |
                (bits(2) << 6) | bits(3),
            4};
  }
  return {b0, 1};
}

bool IsUnicodeSpace(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 ||
         c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool IsAsciiPunct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u);
}

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// Length-prefixed join, unambiguous for arbitrary token bytes.
std::string NgramKey(const TokenSeq& tokens, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t i = start; i < start + n; ++i) {
    key += std::to_string(tokens[i].size());
    key += ':';
    key += tokens[i];
  }
  return key;
}

NgramCounts CountNgrams(const TokenSeq& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[NgramKey(tokens, i, n)];
  }
  return counts;
}

}  // namespace

TokenSeq Tokenize(std::string_view text) {
  TokenSeq out;
  auto flush = [&](std::string& word) {
    std::size_t lo = 0, hi = word.size();
    while (lo < hi && IsAsciiPunct(word[lo])) ++lo;
    while (hi > lo && IsAsciiPunct(word[hi - 1])) --hi;
    if (hi > lo) out.push_back(word.substr(lo, hi - lo));
    word.clear();
  };
  std::string word;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto [cp, len] = DecodeUtf8(text, pos);
    if (IsUnicodeSpace(cp)) {
      flush(word);
    } else {
      for (std::size_t i = 0; i < len; ++i) {
        const auto u = static_cast<unsigned char>(text[pos + i]);
        word.push_back(u < 0x80 ? static_cast<char>(std::tolower(u))
                                : text[pos + i]);
      }
    }
    pos += len;
  }
  flush(word);
  return out;
}

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

BleuStats ComputeBleuStats(const TokenSeq& candidate,
                           std::span<const TokenSeq> references) {
  if (references.empty()) throw ContractError("BLEU needs at least one reference");
  BleuStats stats;
  stats.candidate_length = candidate.size();
  const long c = static_cast<long>(candidate.size());
  std::size_t best = references.front().size();
  for (const TokenSeq& ref : references) {
    const long diff = std::labs(static_cast<long>(ref.size()) - c);
    const long best_diff = std::labs(static_cast<long>(best) - c);
    if (diff < best_diff || (diff == best_diff && ref.size() < best)) {
      best = ref.size();
    }
  }
  stats.reference_length = best;

  for (std::size_t n = 1; n <= 4; ++n) {
    NgramCounts cand = CountNgrams(candidate, n);
    NgramCounts max_ref;
    for (const TokenSeq& ref : references) {
      for (const auto& [gram, count] : CountNgrams(ref, n)) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    std::size_t matched = 0;
    for (const auto& [gram, count] : cand) {
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) matched += std::min(count, it->second);
    }
    stats.matches[n - 1] = matched;
    stats.totals[n - 1] = candidate.size() >= n ? candidate.size() - n + 1 : 0;
  }
  return stats;
}

double BleuFromStats(const BleuStats& stats) {
  if (stats.candidate_length == 0 || stats.matches[0] == 0) return 0.0;
  const bool smooth = std::any_of(stats.matches.begin(), stats.matches.end(),
                                  [](std::size_t m) { return m == 0; });
  double log_sum = 0;
  for (std::size_t n = 0; n < 4; ++n) {
    double m = static_cast<double>(stats.matches[n]);
    double t = static_cast<double>(stats.totals[n]);
    if (smooth && n > 0) {
      m += 1;
      t += 1;
    }
    log_sum += std::log(m / t);
  }
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return std::clamp(bp * std::exp(log_sum / 4.0), 0.0, 1.0);
}

double Bleu4(const TokenSeq& candidate, std::span<const TokenSeq> references) {
  return BleuFromStats(ComputeBleuStats(candidate, references));
}

std::size_t LcsLength(const TokenSeq& a, const TokenSeq& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double RougeL(const TokenSeq& candidate, const TokenSeq& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const double lcs = static_cast<double>(LcsLength(candidate, reference));
  if (lcs == 0) return 0.0;
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  return 2 * p * r / (p + r);
}

namespace {

// Depth-first search over candidate positions. A state is the candidate
// position, the reference position matched by the previous candidate token
// (or -1) and the set of used reference positions; its value is the largest
// number of adjacent (i, j) -> (i + 1, j + 1) links obtainable from there
// while still reaching the maximum match count.
class ExactAligner {
 public:
  ExactAligner(const TokenSeq& cand, const TokenSeq& ref)
      : cand_(cand), used_(ref.size(), false) {
    std::map<std::string, std::size_t> cand_count, ref_count;
    for (const auto& t : cand) ++cand_count[t];
    for (std::size_t j = 0; j < ref.size(); ++j) {
      ++ref_count[ref[j]];
      ref_positions_[ref[j]].push_back(j);
    }
    for (const auto& [tok, cc] : cand_count) {
      auto it = ref_count.find(tok);
      if (it != ref_count.end()) {
        need_[tok] = std::min(cc, it->second);
        matches_ += need_[tok];
      }
    }
    // occurrences_from_[i] = occurrences of cand[i] at positions >= i.
    occurrences_from_.resize(cand.size());
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = cand.size(); i-- > 0;) {
      occurrences_from_[i] = ++seen[cand[i]];
    }
  }

  std::size_t matches() const { return matches_; }

  std::size_t MaxLinks() {
    matched_.clear();
    return Search(0, -1);
  }

 private:
  std::string StateKey(std::size_t i, long prev) const {
    std::string key = std::to_string(i) + "/" + std::to_string(prev) + "/";
    for (bool u : used_) key.push_back(u ? '1' : '0');
    return key;
  }

  std::size_t Search(std::size_t i, long prev) {
    if (i == cand_.size()) return 0;
    const std::string& tok = cand_[i];
    auto need_it = need_.find(tok);
    if (need_it == need_.end()) return Search(i + 1, -1);

    const std::string key = StateKey(i, prev);
    if (auto hit = memo_.find(key); hit != memo_.end()) return hit->second;

    const std::size_t remaining = need_it->second - matched_[tok];
    std::size_t best = 0;
    bool feasible = false;
    if (occurrences_from_[i] > remaining) {
      best = Search(i + 1, -1);
      feasible = true;
    }
    if (remaining > 0) {
      for (std::size_t j : ref_positions_[tok]) {
        if (used_[j]) continue;
        used_[j] = true;
        ++matched_[tok];
        const std::size_t link =
            (prev >= 0 && static_cast<std::size_t>(prev) + 1 == j) ? 1 : 0;
        const std::size_t value = link + Search(i + 1, static_cast<long>(j));
        --matched_[tok];
        used_[j] = false;
        if (!feasible || value > best) best = value;
        feasible = true;
      }
    }
    memo_.emplace(key, best);
    return best;
  }

  const TokenSeq& cand_;
  std::vector<bool> used_;
  std::map<std::string, std::vector<std::size_t>> ref_positions_;
  std::map<std::string, std::size_t> need_;
  std::map<std::string, std::size_t> matched_;
  std::vector<std::size_t> occurrences_from_;
  std::unordered_map<std::string, std::size_t> memo_;
  std::size_t matches_ = 0;
};

}  // namespace

MeteorAlignment AlignExact(const TokenSeq& candidate, const TokenSeq& reference) {
  ExactAligner aligner(candidate, reference);
  if (aligner.matches() == 0) return {};
  const std::size_t links = aligner.MaxLinks();
  return {aligner.matches(), aligner.matches() - links};
}

double MeteorLite(const TokenSeq& candidate, const TokenSeq& reference) {
  const MeteorAlignment a = AlignExact(candidate, reference);
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double p = m / static_cast<double>(candidate.size());
  const double r = m / static_cast<double>(reference.size());
  const double fmean = 10 * p * r / (r + 9 * p);
  const double penalty = 0.5 * std::pow(static_cast<double>(a.chunks) / m, 3);
  return fmean * (1 - penalty);
}

namespace {

using TfIdf = std::unordered_map<std::string, double>;

TfIdf Weigh(const NgramCounts& counts,
            const std::unordered_map<std::string, std::size_t>& df,
            double log_docs) {
  TfIdf vec;
  for (const auto& [gram, tf] : counts) {
    auto it = df.find(gram);
    const double d = it == df.end() ? 1.0 : static_cast<double>(it->second);
    vec[gram] = static_cast<double>(tf) * (log_docs - std::log(std::max(1.0, d)));
  }
  return vec;
}

double Cosine(const TfIdf& a, const TfIdf& b) {
  double dot = 0, na = 0, nb = 0;
  for (const auto& [gram, v] : a) {
    na += v * v;
    auto it = b.find(gram);
    if (it != b.end()) dot += v * it->second;
  }
  for (const auto& [gram, v] : b) nb += v * v;
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

std::vector<double> CiderScores(
    std::span<const TokenSeq> candidates,
    std::span<const std::vector<TokenSeq>> references) {
  if (candidates.size() != references.size() || candidates.empty()) {
    throw ContractError("CIDEr needs one non-empty reference set per candidate");
  }
  const double log_docs = std::log(static_cast<double>(references.size()));
  std::vector<double> scores(candidates.size(), 0.0);
  for (std::size_t n = 1; n <= 4; ++n) {
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& refs : references) {
      std::unordered_set<std::string> doc;
      for (const TokenSeq& ref : refs) {
        for (const auto& [gram, count] : CountNgrams(ref, n)) doc.insert(gram);
      }
      for (const auto& gram : doc) ++df[gram];
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (references[i].empty()) {
        throw ContractError("CIDEr reference set is empty");
      }
      const TfIdf cand = Weigh(CountNgrams(candidates[i], n), df, log_docs);
      double sum = 0;
      for (const TokenSeq& ref : references[i]) {
        sum += Cosine(cand, Weigh(CountNgrams(ref, n), df, log_docs));
      }
      scores[i] += sum / static_cast<double>(references[i].size());
    }
  }
  for (double& s : scores) s = s / 4.0 * 10.0;
  return scores;
}

double Cider(std::span<const TokenSeq> candidates,
             std::span<const std::vector<TokenSeq>> references) {
  const std::vector<double> scores = CiderScores(candidates, references);
  double sum = 0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

OneHotEmbedder::OneHotEmbedder(std::span<const std::string> vocabulary) {
  std::set<std::string> sorted(vocabulary.begin(), vocabulary.end());
  for (const auto& tok : sorted) index_.emplace(tok, index_.size());
}

OneHotEmbedder OneHotEmbedder::FromTexts(std::span<const std::string> texts) {
  std::vector<std::string> vocab;
  for (const auto& text : texts) {
    TokenSeq tokens = Tokenize(text);
    vocab.insert(vocab.end(), tokens.begin(), tokens.end());
  }
  return OneHotEmbedder(vocab);
}

std::vector<double> OneHotEmbedder::Embed(std::string_view token) const {
  std::vector<double> v(dim(), 0.0);
  auto it = index_.find(std::string(token));
  v[it == index_.end() ? index_.size() : it->second] = 1.0;
  return v;
}

double SemanticScore(const TokenSeq& candidate, const TokenSeq& reference,
                     const Embedder& embedder) {
  if (candidate.empty() || reference.empty()) return 0.0;
  auto embed_all = [&](const TokenSeq& seq) {
    std::vector<std::vector<double>> out;
    for (const auto& tok : seq) {
      out.push_back(embedder.Embed(tok));
      if (out.back().size() != embedder.dim()) {
        throw BackendError("embedder '" + embedder.name() +
                           "' returned a vector of the wrong width");
      }
    }
    return out;
  };
  const auto cand = embed_all(candidate);
  const auto ref = embed_all(reference);
  std::vector<std::vector<double>> sim(cand.size(),
                                       std::vector<double>(ref.size(), 0.0));
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      double dot = 0;
      for (std::size_t k = 0; k < cand[i].size(); ++k) dot += cand[i][k] * ref[j][k];
      sim[i][j] = std::clamp(dot, -1.0, 1.0);
    }
  }
  double precision = 0, recall = 0;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    precision += *std::max_element(sim[i].begin(), sim[i].end());
  }
  for (std::size_t j = 0; j < ref.size(); ++j) {
    double best = -1;
    for (std::size_t i = 0; i < cand.size(); ++i) best = std::max(best, sim[i][j]);
    recall += best;
  }
  precision /= static_cast<double>(cand.size());
  recall /= static_cast<double>(ref.size());
  if (precision + recall <= 0) return 0.0;
  return std::clamp(2 * precision * recall / (precision + recall), 0.0, 1.0);
}

MetricReport ScoreCorpus(std::span<const ScoredPair> pairs,
                         const Embedder& embedder) {
  if (pairs.empty()) throw InputError("no prediction/reference pairs to score");
  std::unordered_set<std::string> ids;
  for (const auto& p : pairs) {
    if (!ids.insert(p.id).second) throw InputError("duplicate id '" + p.id + "'");
  }

  MetricReport report;
  report.count = pairs.size();
  std::vector<TokenSeq> candidates;
  std::vector<std::vector<TokenSeq>> references;
  BleuStats pooled;
  for (const auto& p : pairs) {
    TokenSeq cand = Tokenize(p.candidate);
    TokenSeq ref = Tokenize(p.reference);
    const std::array<TokenSeq, 1> refs{ref};
    BleuStats stats = ComputeBleuStats(cand, refs);
    pooled += stats;

    SampleScores s;
    s.id = p.id;
    s.bleu4 = BleuFromStats(stats);
    s.rouge_l = RougeL(cand, ref);
    s.meteor = MeteorLite(cand, ref);
    s.semantic = SemanticScore(cand, ref, embedder);
    report.corpus.rouge_l += s.rouge_l;
    report.corpus.meteor += s.meteor;
    report.corpus.semantic += s.semantic;
    report.per_sample.push_back(std::move(s));

    candidates.push_back(std::move(cand));
    references.push_back({std::move(ref)});
  }
  const double n = static_cast<double>(pairs.size());
  report.corpus.rouge_l /= n;
  report.corpus.meteor /= n;
  report.corpus.semantic /= n;
  report.corpus.bleu4 = BleuFromStats(pooled);
  report.corpus.cider = Cider(candidates, references);
  return report;
}

std::unique_ptr<Embedder> MakeEmbedder(std::string_view name,
                                       std::span<const std::string> texts) {
  if (name == "one-hot") {
    return std::make_unique<OneHotEmbedder>(OneHotEmbedder::FromTexts(texts));
  }
  throw InputError("unknown embedder '" + std::string(name) + "'");
}

}  // namespace ecx
