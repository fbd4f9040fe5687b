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

#ifndef ECX_CONFIG_H_
#define ECX_CONFIG_H_

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "ecx/face_detection.h"

namespace ecx {

// Settings for every command. Read from a key = value file (INI sections
// map to dotted prefixes, so "[detector] iou_threshold" is
// "detector.iou_threshold"); each key can be overridden by an environment
// variable named ECX_ + the key upper-cased with '.' replaced by '_', e.g.
// ECX_DETECTOR_IOU_THRESHOLD.
struct RunConfig {
  // Vision-language chain.
  std::string encoder = "patch-stats";
  std::size_t patch = 16;
  std::size_t embed_dim = 8;
  std::size_t token_width = 8;
  std::string projection_path;

  // Face detection.
  DetectorConfig detector;
  std::string feature_extractor = "pooled-gray";
  std::string detection_head = "center-cell";
  double constant_score = 0.9;

  // Facial emotion.
  std::string mfn_extractor = "grid-mean";
  std::size_t feature_h = 7;
  std::size_t feature_w = 7;
  std::size_t feature_channels = 4;
  std::vector<double> dda_kernel{0.25, 0.5, 0.25};
  std::string classifier_head_path;
  std::string classifier_bias_path;

  // Generation.
  std::string backend = "echo";
  std::string endpoint;
  std::chrono::milliseconds timeout{5000};
  std::string canned_reply;
  std::string instruction;

  // Metrics and dataset tooling.
  std::string embedder = "one-hot";
  double dedup_threshold = 1.0;

  std::uint64_t seed = 42;

  // Throws InputError for unknown component names or out-of-range values.
  void Validate() const;
};

// Defaults, then `path` (when non-empty), then environment overrides.
// Unknown keys are rejected.
RunConfig LoadRunConfig(const std::string& path);

// Documented list of keys with their defaults, one "key = value" per line.
std::string DefaultConfigText();

std::vector<double> ParseNumberList(const std::string& text);

}  // namespace ecx

#endif  // ECX_CONFIG_H_
