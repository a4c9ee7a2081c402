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
// Test-time-augmentation fusion: bring each augmented prediction back to the
// base pixel grid, then vote per pixel with resolution-priority tie breaking.

#pragma once

#include <utility>
#include <vector>

#include "vseg/image.hpp"

namespace vseg::tta {

/// One augmentation variant. precedence_rank orders tie breaking: lower rank
/// wins, and ranks must be unique within an ensemble. The conventional
/// ordering is descending scale with the non-flipped variant first.
struct AugSpec {
  double scale = 1.0;
  bool flipped = false;
  int precedence_rank = 0;
};

/// A prediction still in its augmented geometry.
struct EnsemblePrediction {
  AugSpec aug;
  LabelMap labels;
};

/// The default 8-variant ensemble: scales {1.2, 1.1, 1.0, 0.9}, each with a
/// non-flipped and a flipped variant, ranked in that order (rank 0 first).
std::vector<AugSpec> default_ensemble();

/// Horizontal un-flip (when flipped) followed by nearest-neighbor resize to
/// the base dimensions. The label value set is preserved exactly.
/// The prediction's dimensions must match round(base * scale) within 1 px.
LabelMap normalize_prediction(const EnsemblePrediction& pred, int base_width,
                              int base_height);

/// Per-pixel plurality vote across the ensemble. Tied counts resolve to the
/// tied label whose supporting prediction has the lowest precedence rank.
/// Deterministic; invariant under reordering of the input list.
LabelMap majority_vote(const std::vector<std::pair<LabelMap, AugSpec>>& preds);

/// Nearest-neighbor resize for label maps (pixel-center mapping).
LabelMap resize_nearest(const LabelMap& src, int dst_width, int dst_height);

/// Mirror around the vertical axis.
LabelMap flip_horizontal(const LabelMap& src);

}  // namespace vseg::tta
