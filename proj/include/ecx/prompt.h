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

#ifndef ECX_PROMPT_H_
#define ECX_PROMPT_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecx/tensor.h"
#include "ecx/vision_language.h"

namespace ecx {

// Marks where the video token block sits in the text channel. The block
// itself never appears in the text.
inline constexpr std::string_view kVideoTokenPlaceholder = "<vid-tokens>";
inline constexpr std::string_view kDefaultInstruction =
    "Explain the cause of the emotion expressed by the target utterance, "
    "using the video and the conversation.";

struct PromptBundle {
  std::string instruction;
  // Dialogue history, the target utterance and its emotion.
  std::string user_query;
  VideoTokens video_tokens;
  // Emotion label from the facial pipeline, or "none".
  std::string emotion_tag = "none";
};

enum class SegmentKind { kLiteral, kInstruction, kQuery, kVideoTokens, kEmotion };

struct Segment {
  SegmentKind kind;
  std::size_t offset;
  std::size_t length;
};

// Text channel plus the out-of-band token block. The text is
//   "USER: " instr " " query "<vid-tokens>" "<emotion:" tag ">" "\nAssistant: "
// with '<' in instruction and query written as "<<".
struct RenderedPrompt {
  std::string text;
  std::vector<Segment> segments;
  Tensor tokens;

  std::size_t token_rows() const { return tokens.shape()[0]; }
  std::size_t token_width() const { return tokens.shape()[1]; }
  std::string_view segment_text(SegmentKind kind) const;
};

std::string EscapePromptText(std::string_view text);
std::string UnescapePromptText(std::string_view text);

// Throws InputError on empty instruction/query, an unknown emotion tag or a
// token block that is not rank 2.
RenderedPrompt AssemblePrompt(const PromptBundle& bundle);

// Inverse of AssemblePrompt on the text fields.
struct PromptFields {
  std::string instruction;
  std::string user_query;
  std::string emotion_tag;
  friend bool operator==(const PromptFields&, const PromptFields&) = default;
};
PromptFields ParsePrompt(const RenderedPrompt& prompt);

// Line-delimited JSON wire protocol. Requests carry
// {instruction, query, emotion, tokens_shape, tokens_b64} where tokens_b64
// is base64 of little-endian float32 values; responses carry {explanation}.
std::string EncodeWireRequest(const RenderedPrompt& prompt);
struct WireRequest {
  PromptFields fields;
  Tensor tokens;
};
WireRequest DecodeWireRequest(std::string_view line);
std::string EncodeWireResponse(std::string_view explanation);
// Throws BackendError (with the raw line attached) on malformed replies.
std::string DecodeWireResponse(std::string_view line);

std::string Base64Encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> Base64Decode(std::string_view text);

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string name() const = 0;
  // Returns the raw reply text. Throws BackendError on transport failure.
  virtual std::string Generate(const RenderedPrompt& prompt,
                               std::chrono::milliseconds timeout) const = 0;
};

// Replies with the rendered user query segment.
class EchoBackend : public GenerationBackend {
 public:
  std::string name() const override { return "echo"; }
  std::string Generate(const RenderedPrompt& prompt,
                       std::chrono::milliseconds) const override;
};

inline constexpr std::string_view kDefaultCannedReply =
    "Because the speaker is reacting to what was said earlier in the "
    "conversation.";

class CannedBackend : public GenerationBackend {
 public:
  explicit CannedBackend(std::string reply = std::string(kDefaultCannedReply))
      : reply_(std::move(reply)) {}
  std::string name() const override { return "canned"; }
  std::string Generate(const RenderedPrompt&,
                       std::chrono::milliseconds) const override {
    return reply_;
  }

 private:
  std::string reply_;
};

// Fault injection: always returns `reply` (empty by default).
class FaultBackend : public GenerationBackend {
 public:
  explicit FaultBackend(std::string reply = {}) : reply_(std::move(reply)) {}
  std::string name() const override { return "fault"; }
  std::string Generate(const RenderedPrompt&,
                       std::chrono::milliseconds) const override {
    return reply_;
  }

 private:
  std::string reply_;
};

// TCP client speaking the wire protocol; one connection per call.
class WireBackend : public GenerationBackend {
 public:
  // `endpoint` is "host:port".
  explicit WireBackend(std::string endpoint);
  std::string name() const override { return "wire"; }
  std::string Generate(const RenderedPrompt& prompt,
                       std::chrono::milliseconds timeout) const override;

 private:
  std::string host_;
  std::string port_;
};

struct BackendOptions {
  std::string endpoint;
  std::string canned_reply = std::string(kDefaultCannedReply);
};

std::unique_ptr<GenerationBackend> MakeBackend(std::string_view name,
                                               const BackendOptions& options);

struct GenerationResult {
  std::string explanation;
  std::string backend_id;
  double latency_ms = 0;
};

// Renders the bundle, calls the backend and strips trailing whitespace.
// An empty reply raises BackendError.
GenerationResult GenerateExplanation(const PromptBundle& bundle,
                                     const GenerationBackend& backend,
                                     std::chrono::milliseconds timeout);

}  // namespace ecx

#endif  // ECX_PROMPT_H_
