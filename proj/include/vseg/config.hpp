// Copyright 2026 The vseg Authors
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
//
// One JSON configuration file drives the whole toolkit. Every numeric
// default is embedded, so a minimal config only names the dataset root, the
// prediction root(s), the output directory and the taxonomy size. Unknown
// keys are rejected to catch typos; parse(serialize(c)) == c.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vseg/consistency.hpp"
#include "vseg/flow.hpp"
#include "vseg/mvc.hpp"
#include "vseg/tta.hpp"
#include "vseg/vlm.hpp"

namespace vseg::config {

struct TaxonomyConfig {
  // Dense ids 0..num_classes-1. Names default to "class_<id>" when only
  // num_classes is given.
  std::vector<std::string> class_names;
  std::set<uint16_t> ignore_labels{255};
  std::vector<vlm::ConfusableGroup> confusable_groups;
  // Optional colorized-export palette; when present, one RGB entry per class.
  std::vector<std::array<uint8_t, 3>> palette;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  void validate() const;  // throws ConfigError
};

struct VlmSettings {
  std::string mode = "off";  // "off" | "mock" | "http"
  std::string endpoint;      // http://host:port/path, for mode "http"
  std::string token_env;     // env var holding the bearer token (optional)
  double min_pixel_fraction = 0.05;
  int timeout_seconds = 30;
  // Canned answers for mode "mock": video id -> answer text, plus fallback.
  std::map<std::string, std::string> mock_answers;
  std::string mock_default_answer;

  void validate() const;
};

struct PipelineConfig {
  std::string dataset_root;
  std::vector<std::string> prediction_roots;  // 1 or 2 candidate models
  std::vector<std::string> candidate_names;   // same length; defaults model_a/b
  std::string output_dir;
  std::string report_path;  // default: <output_dir>/report.json

  TaxonomyConfig taxonomy;
  flow::FarnebackParams farneback;
  consistency::SsimParams ssim;
  mvc::MaskParams mask;
  std::vector<tta::AugSpec> augs;  // default: the 8-variant ensemble
  std::set<int> metric_ks{8, 16};
  VlmSettings vlm;
  int workers = 1;
  uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

/// Config with every default filled in and empty paths.
PipelineConfig default_config();

/// Parse from JSON text; missing keys inherit defaults, unknown keys are
/// config errors. Does not call validate().
PipelineConfig parse_config(const std::string& json_text);

PipelineConfig load_config_file(const std::string& path);

std::string serialize_config(const PipelineConfig& config);

}  // namespace vseg::config
