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

#include "ecx/config.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <boost/program_options.hpp>

#include "ecx/errors.h"

namespace po = boost::program_options;

namespace ecx {

namespace {

std::string JoinNumbers(const std::vector<double>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << values[i];
  }
  return out.str();
}

struct RawConfig {
  std::string anchor_scales;
  std::string dda_kernel;
  long long timeout_ms = 0;
  unsigned long long seed = 0;
};

po::options_description Describe(RunConfig& c, RawConfig& raw) {
  const RunConfig d;
  po::options_description desc("run configuration");
  // clang-format off
  desc.add_options()
    ("vision.encoder", po::value(&c.encoder)->default_value(d.encoder))
    ("vision.patch", po::value(&c.patch)->default_value(d.patch))
    ("vision.embed_dim", po::value(&c.embed_dim)->default_value(d.embed_dim))
    ("vision.token_width", po::value(&c.token_width)->default_value(d.token_width))
    ("vision.projection", po::value(&c.projection_path)->default_value(""))
    ("detector.anchor_scales", po::value(&raw.anchor_scales)->default_value(JoinNumbers(d.detector.anchor_scales)))
    ("detector.anchor_stride", po::value(&c.detector.anchor_stride)->default_value(d.detector.anchor_stride))
    ("detector.score_threshold", po::value(&c.detector.score_threshold)->default_value(d.detector.score_threshold))
    ("detector.iou_threshold", po::value(&c.detector.iou_threshold)->default_value(d.detector.iou_threshold))
    ("detector.feature_extractor", po::value(&c.feature_extractor)->default_value(d.feature_extractor))
    ("detector.head", po::value(&c.detection_head)->default_value(d.detection_head))
    ("detector.constant_score", po::value(&c.constant_score)->default_value(d.constant_score))
    ("emotion.extractor", po::value(&c.mfn_extractor)->default_value(d.mfn_extractor))
    ("emotion.feature_h", po::value(&c.feature_h)->default_value(d.feature_h))
    ("emotion.feature_w", po::value(&c.feature_w)->default_value(d.feature_w))
    ("emotion.feature_channels", po::value(&c.feature_channels)->default_value(d.feature_channels))
    ("emotion.dda_kernel", po::value(&raw.dda_kernel)->default_value(JoinNumbers(d.dda_kernel)))
    ("emotion.head_weights", po::value(&c.classifier_head_path)->default_value(""))
    ("emotion.head_bias", po::value(&c.classifier_bias_path)->default_value(""))
    ("backend.name", po::value(&c.backend)->default_value(d.backend))
    ("backend.endpoint", po::value(&c.endpoint)->default_value(""))
    ("backend.timeout_ms", po::value(&raw.timeout_ms)->default_value(d.timeout.count()))
    ("backend.canned_reply", po::value(&c.canned_reply)->default_value(""))
    ("prompt.instruction", po::value(&c.instruction)->default_value(""))
    ("metrics.embedder", po::value(&c.embedder)->default_value(d.embedder))
    ("dataset.dedup_threshold", po::value(&c.dedup_threshold)->default_value(d.dedup_threshold))
    ("seed", po::value(&raw.seed)->default_value(d.seed));
  // clang-format on
  return desc;
}

std::string EnvName(const std::string& key) {
  std::string out = "ECX_";
  for (char ch : key) {
    out.push_back(ch == '.' ? '_'
                            : static_cast<char>(std::toupper(
                                  static_cast<unsigned char>(ch))));
  }
  return out;
}

}  // namespace

std::vector<double> ParseNumberList(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(),
                              [](unsigned char ch) { return std::isspace(ch); }),
               item.end());
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw InputError("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void RunConfig::Validate() const {
  auto one_of = [](const std::string& value,
                   std::initializer_list<const char*> names, const char* key) {
    for (const char* n : names) {
      if (value == n) return;
    }
    throw InputError(std::string("unknown ") + key + " '" + value + "'");
  };
  one_of(encoder, {"patch-stats"}, "vision.encoder");
  one_of(feature_extractor, {"pooled-gray"}, "detector.feature_extractor");
  one_of(detection_head, {"center-cell", "constant"}, "detector.head");
  one_of(mfn_extractor, {"grid-mean"}, "emotion.extractor");
  one_of(backend, {"echo", "canned", "wire", "fault"}, "backend.name");
  one_of(embedder, {"one-hot"}, "metrics.embedder");
  if (patch == 0 || embed_dim == 0 || token_width == 0) {
    throw InputError("vision dims must be positive");
  }
  detector.Validate();
  if (!(constant_score >= 0 && constant_score <= 1)) {
    throw InputError("detector.constant_score must lie in [0,1]");
  }
  if (feature_h == 0 || feature_w == 0 || feature_channels == 0) {
    throw InputError("emotion feature dims must be positive");
  }
  if (dda_kernel.empty() || dda_kernel.size() % 2 == 0) {
    throw InputError("emotion.dda_kernel must have odd length");
  }
  if (classifier_head_path.empty() != classifier_bias_path.empty()) {
    throw InputError("emotion.head_weights and emotion.head_bias go together");
  }
  if (backend == "wire" && endpoint.empty()) {
    throw InputError("backend.endpoint is required for the wire backend");
  }
  if (timeout.count() <= 0) throw InputError("backend.timeout_ms must be positive");
  if (!(dedup_threshold >= 0)) {
    throw InputError("dataset.dedup_threshold must be >= 0");
  }
}

RunConfig LoadRunConfig(const std::string& path) {
  RunConfig config;
  RawConfig raw;
  po::options_description desc = Describe(config, raw);
  po::variables_map vm;
  try {
    // The first stored value wins, so environment overrides go in first.
    po::store(po::parse_environment(
                  desc,
                  [&desc](const std::string& env) -> std::string {
                    for (const auto& opt : desc.options()) {
                      if (EnvName(opt->long_name()) == env) {
                        return opt->long_name();
                      }
                    }
                    return {};
                  }),
              vm);
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw InputError("cannot open config '" + path + "'");
      po::store(po::parse_config_file(in, desc), vm);
    }
    po::notify(vm);
  } catch (const po::error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  config.detector.anchor_scales = ParseNumberList(raw.anchor_scales);
  config.dda_kernel = ParseNumberList(raw.dda_kernel);
  config.timeout = std::chrono::milliseconds(raw.timeout_ms);
  config.seed = raw.seed;
  config.Validate();
  return config;
}

std::string DefaultConfigText() {
  RunConfig config;
  RawConfig raw;
  po::options_description desc = Describe(config, raw);
  std::ostringstream out;
  for (const auto& opt : desc.options()) {
    boost::any value;
    std::string text;
    if (opt->semantic()->apply_default(value)) {
      if (auto* s = boost::any_cast<std::string>(&value)) text = *s;
      else if (auto* z = boost::any_cast<std::size_t>(&value)) text = std::to_string(*z);
      else if (auto* d = boost::any_cast<double>(&value)) text = JoinNumbers({*d});
      else if (auto* l = boost::any_cast<long long>(&value)) text = std::to_string(*l);
      else if (auto* u = boost::any_cast<unsigned long long>(&value)) text = std::to_string(*u);
    }
    out << opt->long_name() << " = " << text << "\n";
  }
  return out.str();
}

}  // namespace ecx
