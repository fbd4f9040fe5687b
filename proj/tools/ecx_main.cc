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

// ecx: command-line driver for the emotion-cause explanation pipeline.
//
//   ecx fuse VIDEO --out TOKENS
//   ecx faces VIDEO
//   ecx explain CORPUS --conversation ID [--utterance ID]
//   ecx score PREDICTIONS REFERENCES
//   ecx dataset {clips|dedup|gate|stats} CORPUS
//
// Global flags: --config FILE, --seed N, --out PATH.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "ecx/config.h"
#include "ecx/container.h"
#include "ecx/dataset.h"
#include "ecx/errors.h"
#include "ecx/metrics.h"
#include "ecx/pipeline.h"
#include "json.hpp"

namespace {

using nlohmann::json;

enum ExitCode {
  kOk = 0,
  kUnknownError = 1,
  kInputErrorExit = 2,
  kFormatErrorExit = 3,
  kBackendErrorExit = 4,
  kContractErrorExit = 5,
  kUsageErrorExit = 64,
};

struct GlobalOptions {
  std::string config_path;
  std::optional<unsigned long long> seed;
  std::string out;
};

ecx::RunConfig LoadConfig(const GlobalOptions& g) {
  ecx::RunConfig config = ecx::LoadRunConfig(g.config_path);
  if (g.seed) config.seed = *g.seed;
  return config;
}

void Emit(const json& j, const GlobalOptions& g) {
  const std::string text = j.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out, std::ios::trunc);
  out << text;
  if (!out) throw ecx::InputError("cannot write " + g.out);
}

std::string DirectoryOf(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

// JSON lines of {"id": ..., "text": ...}, keyed by id in file order.
std::vector<std::pair<std::string, std::string>> LoadTexts(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ecx::InputError("cannot open " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      std::string id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                              : j.at("id").dump();
      std::string text = j.at("text").get<std::string>();
      if (!seen.insert(id).second) {
        throw ecx::InputError("duplicate id '" + id + "'");
      }
      out.emplace_back(std::move(id), std::move(text));
    } catch (const json::exception& e) {
      throw ecx::InputError(path + " line " + std::to_string(line_no) + ": " +
                            e.what());
    } catch (const ecx::InputError& e) {
      throw ecx::InputError(path + " line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return out;
}

int CmdFuse(const GlobalOptions& g, const std::string& video_path) {
  if (g.out.empty()) throw ecx::InputError("fuse needs --out");
  const ecx::RunConfig config = LoadConfig(g);
  const ecx::Video video = ecx::LoadVideo(video_path, config.patch);
  const ecx::VideoTokens tokens = ecx::FuseVideo(video, config);
  ecx::SaveTensor(g.out, tokens.values);
  std::cout << tokens.rows() << "x" << tokens.width() << "\n";
  return kOk;
}

int CmdFaces(const GlobalOptions& g, const std::string& video_path) {
  const ecx::RunConfig config = LoadConfig(g);
  const ecx::Video video = ecx::LoadVideo(video_path, config.patch);
  Emit(ecx::ToJson(ecx::AnalyzeFaces(video, config)), g);
  return kOk;
}

int CmdExplain(const GlobalOptions& g, const std::string& corpus_path,
               const std::string& conversation,
               const std::optional<std::string>& utterance, bool timings) {
  const ecx::RunConfig config = LoadConfig(g);
  const auto corpus = ecx::LoadCorpus(corpus_path);
  const ecx::ExplainOutcome outcome = ecx::ExplainUtterance(
      corpus, conversation, utterance, DirectoryOf(corpus_path), config);
  Emit(ecx::ToJson(outcome, timings), g);
  return kOk;
}

int CmdScore(const GlobalOptions& g, const std::string& predictions_path,
             const std::string& references_path) {
  const ecx::RunConfig config = LoadConfig(g);
  const auto predictions = LoadTexts(predictions_path);
  const auto references = LoadTexts(references_path);
  std::map<std::string, std::string> ref_by_id(references.begin(),
                                               references.end());
  std::set<std::string> pred_ids;
  std::vector<std::string> offenders;
  std::vector<ecx::ScoredPair> pairs;
  for (const auto& [id, text] : predictions) {
    pred_ids.insert(id);
    auto it = ref_by_id.find(id);
    if (it == ref_by_id.end()) {
      offenders.push_back(id + " (no reference)");
      continue;
    }
    pairs.push_back({id, text, it->second});
  }
  for (const auto& [id, text] : references) {
    if (!pred_ids.count(id)) offenders.push_back(id + " (no prediction)");
  }
  if (!offenders.empty()) {
    std::string msg = "prediction/reference ids do not align:";
    for (const auto& o : offenders) msg += " " + o;
    throw ecx::InputError(msg);
  }
  std::vector<std::string> texts;
  for (const auto& p : pairs) {
    texts.push_back(p.candidate);
    texts.push_back(p.reference);
  }
  auto embedder = ecx::MakeEmbedder(config.embedder, texts);
  Emit(ecx::ToJson(ecx::ScoreCorpus(pairs, *embedder)), g);
  return kOk;
}

int CmdDataset(const GlobalOptions& g, const std::string& action,
               const std::string& corpus_path) {
  const ecx::RunConfig config = LoadConfig(g);
  const auto corpus = ecx::LoadCorpus(corpus_path);

  if (action == "clips") {
    std::vector<ecx::ClipSpec> clips;
    for (const auto& c : corpus) {
      auto more = ecx::CumulativeClips(c);
      clips.insert(clips.end(), more.begin(), more.end());
    }
    Emit(ecx::ToJson(clips), g);
    return kOk;
  }

  if (action == "dedup") {
    if (g.out.empty()) throw ecx::InputError("dataset dedup needs --out DIR");
    std::filesystem::create_directories(g.out);
    json report = json::array();
    for (const auto& c : corpus) {
      for (const auto& clip : ecx::CumulativeClips(c)) {
        ecx::ClipVideo cv =
            ecx::LoadClipVideo(clip, DirectoryOf(corpus_path), config);
        const std::string name =
            c.id + "_" + std::to_string(clip.index) + ".ftc";
        ecx::SaveTensor((std::filesystem::path(g.out) / name).string(),
                        ecx::VideoToTensor(cv.video));
        report.push_back({{"conversation_id", c.id},
                          {"index", clip.index},
                          {"total_frames", cv.total_frames},
                          {"kept_frames", cv.video.frames.size()},
                          {"path", name}});
      }
    }
    std::cout << report.dump(2) << "\n";
    return kOk;
  }

  if (action == "gate") {
    json report = json::array();
    for (const auto& c : corpus) {
      for (const auto& a : c.annotations) {
        const std::array<std::string, 2> texts{a.annotator_a, a.annotator_b};
        auto embedder = ecx::MakeEmbedder(config.embedder, texts);
        const ecx::GateResult gate =
            ecx::AgreementGate(a.annotator_a, a.annotator_b, *embedder);
        json row = {{"conversation_id", c.id},
                    {"utterance_id", a.utterance_id},
                    {"score", gate.score},
                    {"route", ecx::RouteName(gate.route)}};
        if (gate.route == ecx::Route::kVote && a.votes) {
          row["final"] = ecx::ResolveVote(a.annotator_a, a.annotator_b, *a.votes);
        } else if (!a.final.empty()) {
          row["final"] = a.final;
        }
        report.push_back(std::move(row));
      }
    }
    Emit(report, g);
    return kOk;
  }

  if (action == "stats") {
    std::size_t unresolved = 0;
    const auto records = ecx::CollectCauseRecords(corpus, &unresolved);
    json j = ecx::ToJson(ecx::ComputeCorpusStats(records));
    j["unresolved"] = unresolved;
    Emit(j, g);
    return kOk;
  }
  throw ecx::InputError("unknown dataset action '" + action + "'");
}

int ReportError(const std::string& kind, const std::string& message,
                json extra, int code) {
  json j = {{"error", kind}, {"message", message}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-cause explanation pipeline tools"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand.
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Run configuration file");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--out", g.out, "Output path");

  std::string video_path, corpus_path, predictions_path, references_path;
  std::string conversation, action;
  std::optional<std::string> utterance;
  bool timings = false;

  auto* fuse = app.add_subcommand("fuse", "Video container -> video token container");
  fuse->add_option("video", video_path)->required();

  auto* faces = app.add_subcommand("faces", "Per-face emotions and dominant label");
  faces->add_option("video", video_path)->required();

  auto* explain = app.add_subcommand("explain", "Generate a cause explanation");
  explain->add_option("corpus", corpus_path)->required();
  explain->add_option("--conversation", conversation, "Conversation id")->required();
  explain->add_option("--utterance", utterance, "Target utterance id (default: last)");
  explain->add_flag("--timings", timings, "Include backend latency in the output");

  auto* score = app.add_subcommand("score", "Automatic metrics for predictions");
  score->add_option("predictions", predictions_path)->required();
  score->add_option("references", references_path)->required();

  auto* dataset = app.add_subcommand("dataset", "Corpus construction tools");
  dataset->add_option("action", action)
      ->required()
      ->check(CLI::IsMember({"clips", "dedup", "gate", "stats"}));
  dataset->add_option("corpus", corpus_path)->required();

  auto* config = app.add_subcommand("config", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsageErrorExit;
  }

  try {
    if (*fuse) return CmdFuse(g, video_path);
    if (*faces) return CmdFaces(g, video_path);
    if (*explain) return CmdExplain(g, corpus_path, conversation, utterance, timings);
    if (*score) return CmdScore(g, predictions_path, references_path);
    if (*dataset) return CmdDataset(g, action, corpus_path);
    if (*config) {
      std::cout << ecx::DefaultConfigText();
      return kOk;
    }
  } catch (const ecx::FormatError& e) {
    return ReportError("format", e.what(),
                       {{"code", ecx::FormatErrorCodeName(e.code())},
                        {"offset", e.offset()}},
                       kFormatErrorExit);
  } catch (const ecx::BackendError& e) {
    return ReportError("backend", e.what(), {{"payload", e.payload()}},
                       kBackendErrorExit);
  } catch (const ecx::InputError& e) {
    return ReportError("input", e.what(), json::object(), kInputErrorExit);
  } catch (const ecx::ContractError& e) {
    return ReportError("contract", e.what(), json::object(), kContractErrorExit);
  } catch (const std::exception& e) {
    return ReportError("internal", e.what(), json::object(), kUnknownError);
  }
  return kUnknownError;
}
