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
// On-disk layout conventions.
//
// Dataset root (frames + optional ground truth):
//   <root>/<video_id>/frames/<stem>.png|jpg|jpeg
//   <root>/<video_id>/masks/<stem>.png          (optional, stems must match)
// Lexicographic stem order defines temporal order, so numeric stems must be
// zero-padded (00000, 00001, …).
//
// Prediction root (one per candidate model), one subdirectory per
// augmentation variant:
//   <pred>/<video_id>/<variant>/<stem>.png      variant = s<scale*100>[_flip]
// e.g. s090, s100, s110_flip, s120. When the configured ensemble is exactly
// the identity augmentation (scale 1.0, no flip), a flat layout
// <pred>/<video_id>/<stem>.png is also accepted.
//
// Output root mirrors the dataset:  <out>/<video_id>/<stem>.png

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vseg/image.hpp"
#include "vseg/tta.hpp"

namespace vseg::dataset {

/// Sorted list of video ids (immediate subdirectories of root).
std::vector<std::string> list_videos(const std::string& root);

struct VideoData {
  std::string video_id;
  std::vector<std::string> stems;  // sorted, one per frame
  std::vector<RgbFrame> frames;
  std::optional<std::vector<LabelMap>> masks;  // absent when no masks/ dir
};

/// Load one video's frames and, when present, its ground-truth masks.
/// Errors name the offending file: missing directory, undecodable image,
/// frame/mask stem mismatch, inconsistent dimensions.
VideoData load_video_dir(const std::string& root, const std::string& video_id,
                         int num_classes, const std::set<uint16_t>& ignore_labels);

/// Directory name for one augmentation variant: "s" + round(scale*100),
/// zero-padded to 3 digits, plus "_flip" for mirrored inputs.
std::string variant_dir_name(const tta::AugSpec& spec);

/// Per-frame ensembles for one video: outer index = frame, inner = one
/// prediction per AugSpec in `specs` order. Stems must agree across
/// variants; `stems` returns the sorted frame stems found.
struct EnsembleData {
  std::vector<std::string> stems;
  std::vector<std::vector<tta::EnsemblePrediction>> per_frame;
};

EnsembleData load_prediction_ensemble(const std::string& pred_root,
                                      const std::string& video_id,
                                      const std::vector<tta::AugSpec>& specs,
                                      int num_classes,
                                      const std::set<uint16_t>& ignore_labels);

/// Write one label map per stem to <out_root>/<video_id>/<stem>.png,
/// creating directories as needed.
void write_label_tree(const std::string& out_root, const std::string& video_id,
                      const std::vector<std::string>& stems,
                      const std::vector<LabelMap>& labels);

}  // namespace vseg::dataset
