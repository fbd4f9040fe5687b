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

#include "ecx/prompt.h"

#include <bit>
#include <cctype>
#include <cstring>

#include <sodium.h>

#include "ecx/errors.h"
#include "ecx/facial_emotion.h"
#include "json.hpp"

namespace ecx {

using nlohmann::json;

std::string_view RenderedPrompt::segment_text(SegmentKind kind) const {
  for (const Segment& s : segments) {
    if (s.kind == kind) return std::string_view(text).substr(s.offset, s.length);
  }
  return {};
}

std::string EscapePromptText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out.push_back(c);
    if (c == '<') out.push_back('<');
  }
  return out;
}

std::string UnescapePromptText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    out.push_back(text[i]);
    if (text[i] == '<') {
      if (i + 1 >= text.size() || text[i + 1] != '<') {
        throw InputError("unpaired '<' in escaped prompt text");
      }
      ++i;
    }
  }
  return out;
}

namespace {

bool ValidEmotionTag(std::string_view tag) {
  return tag == "none" || ParseEmotion(tag).has_value();
}

class PromptWriter {
 public:
  explicit PromptWriter(RenderedPrompt& out) : out_(out) {}
  void Append(SegmentKind kind, std::string_view text) {
    out_.segments.push_back({kind, out_.text.size(), text.size()});
    out_.text.append(text);
  }

 private:
  RenderedPrompt& out_;
};

std::vector<std::uint8_t> PackFloat32(const Tensor& t) {
  std::vector<std::uint8_t> bytes(t.size() * 4);
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(t[i]));
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = (bits >> (8 * b)) & 0xFF;
  }
  return bytes;
}

}  // namespace

RenderedPrompt AssemblePrompt(const PromptBundle& bundle) {
  if (bundle.instruction.empty()) throw InputError("prompt instruction is empty");
  if (bundle.user_query.empty()) throw InputError("prompt user query is empty");
  if (!ValidEmotionTag(bundle.emotion_tag)) {
    throw InputError("unknown emotion tag '" + bundle.emotion_tag + "'");
  }
  if (bundle.video_tokens.values.rank() != 2) {
    throw InputError("video token block must be rank 2");
  }
  RenderedPrompt out;
  PromptWriter w(out);
  w.Append(SegmentKind::kLiteral, "USER: ");
  w.Append(SegmentKind::kInstruction, EscapePromptText(bundle.instruction));
  w.Append(SegmentKind::kLiteral, " ");
  w.Append(SegmentKind::kQuery, EscapePromptText(bundle.user_query));
  w.Append(SegmentKind::kVideoTokens, kVideoTokenPlaceholder);
  w.Append(SegmentKind::kLiteral, "<emotion:");
  w.Append(SegmentKind::kEmotion, bundle.emotion_tag);
  w.Append(SegmentKind::kLiteral, ">\nAssistant: ");
  out.tokens = bundle.video_tokens.values;
  return out;
}

PromptFields ParsePrompt(const RenderedPrompt& prompt) {
  return {UnescapePromptText(prompt.segment_text(SegmentKind::kInstruction)),
          UnescapePromptText(prompt.segment_text(SegmentKind::kQuery)),
          std::string(prompt.segment_text(SegmentKind::kEmotion))};
}

std::string Base64Encode(std::span<const std::uint8_t> bytes) {
  const int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_encoded_len(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(),
                    variant);
  out.resize(std::strlen(out.c_str()));
  return out;
}

std::vector<std::uint8_t> Base64Decode(std::string_view text) {
  std::vector<std::uint8_t> out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(),
                        nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw InputError("invalid base64 payload");
  }
  out.resize(len);
  return out;
}

std::string EncodeWireRequest(const RenderedPrompt& prompt) {
  PromptFields fields = ParsePrompt(prompt);
  json j;
  j["instruction"] = fields.instruction;
  j["query"] = fields.user_query;
  j["emotion"] = fields.emotion_tag;
  j["tokens_shape"] = {prompt.token_rows(), prompt.token_width()};
  j["tokens_b64"] = Base64Encode(PackFloat32(prompt.tokens));
  return j.dump() + "\n";
}

WireRequest DecodeWireRequest(std::string_view line) {
  try {
    json j = json::parse(line);
    WireRequest req;
    req.fields.instruction = j.at("instruction").get<std::string>();
    req.fields.user_query = j.at("query").get<std::string>();
    req.fields.emotion_tag = j.at("emotion").get<std::string>();
    auto shape = j.at("tokens_shape").get<std::vector<std::size_t>>();
    if (shape.size() != 2) throw InputError("tokens_shape must have 2 entries");
    auto bytes = Base64Decode(j.at("tokens_b64").get<std::string>());
    if (bytes.size() != shape[0] * shape[1] * 4) {
      throw InputError("token payload length does not match tokens_shape");
    }
    std::vector<double> values(shape[0] * shape[1]);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(bytes[i * 4 + b]) << (8 * b);
      }
      values[i] = std::bit_cast<float>(bits);
    }
    req.tokens = Tensor({shape[0], shape[1]}, std::move(values));
    return req;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed wire request: ") + e.what());
  }
}

std::string EncodeWireResponse(std::string_view explanation) {
  json j;
  j["explanation"] = explanation;
  return j.dump() + "\n";
}

std::string DecodeWireResponse(std::string_view line) {
  try {
    json j = json::parse(line);
    return j.at("explanation").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed wire response: ") + e.what(),
                       std::string(line));
  }
}

std::string EchoBackend::Generate(const RenderedPrompt& prompt,
                                  std::chrono::milliseconds) const {
  return std::string(prompt.segment_text(SegmentKind::kQuery));
}

GenerationResult GenerateExplanation(const PromptBundle& bundle,
                                     const GenerationBackend& backend,
                                     std::chrono::milliseconds timeout) {
  RenderedPrompt prompt = AssemblePrompt(bundle);
  const auto start = std::chrono::steady_clock::now();
  std::string raw = backend.Generate(prompt, timeout);
  const auto stop = std::chrono::steady_clock::now();

  std::string text = raw;
  while (!text.empty() &&
         std::isspace(static_cast<unsigned char>(text.back()))) {
    text.pop_back();
  }
  if (text.empty()) {
    throw BackendError("backend '" + backend.name() + "' returned no text",
                       raw);
  }
  return {std::move(text), backend.name(),
          std::chrono::duration<double, std::milli>(stop - start).count()};
}

}  // namespace ecx
