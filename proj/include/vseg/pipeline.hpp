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
// Full pipeline: per video, vote each candidate's augmentation ensemble,
// pick the temporally more consistent candidate, apply VLM corrections, and
// evaluate against ground truth when present. Videos run independently
// (optionally in parallel); one video's failure never blocks the others and
// all outputs are byte-deterministic regardless of worker count.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vseg/config.hpp"
#include "vseg/metrics.hpp"
#include "vseg/vlm.hpp"

namespace vseg::pipeline {

struct VideoOutcome {
  std::string video_id;
  bool ok = false;
  std::string error;  // diagnostic when !ok
  // Candidate scores in config order (empty for single-candidate runs).
  std::vector<double> scores;
  std::string selected_candidate;
  std::vector<vlm::Correction> corrections;
  bool has_ground_truth = false;
};

struct PipelineResult {
  std::vector<VideoOutcome> outcomes;  // sorted by video id
  int videos_ok = 0;
  int videos_failed = 0;
  // Present when at least one processed video had ground-truth masks.
  std::optional<metrics::MetricReport> report;
};

/// JSON log of per-video selection decisions and correction records.
std::string outcomes_to_json(const std::vector<VideoOutcome>& outcomes);

/// Run the whole pipeline for the given (validated) config. `video_filter`,
/// when non-empty, restricts processing to those video ids. Writes, under
/// config.output_dir: final label PNGs (<video>/<stem>.png), selections.json,
/// corrections.json, and — when ground truth exists — the metric report at
/// config.report_path (default <output_dir>/report.json).
PipelineResult run_pipeline(const config::PipelineConfig& config,
                            const std::vector<std::string>& video_filter = {});

}  // namespace vseg::pipeline
