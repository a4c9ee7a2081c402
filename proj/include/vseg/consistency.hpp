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
// Temporal-consistency scoring of label-map sequences: global-statistics
// structural similarity between a flow-warped prediction and the next frame's
// prediction, averaged per video, plus the two-candidate selection rule.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "vseg/flow.hpp"
#include "vseg/image.hpp"

namespace vseg::consistency {

struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;  // labels are normalized to [0,1] before scoring

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  void validate() const;
};

struct VideoScore {
  std::string video_id;
  std::string candidate_id;
  double score = 0.0;    // mean SSIM over consecutive-frame comparisons
  int pairs_scored = 0;  // frame_count - 1 for multi-frame videos
};

/// Single global similarity value between two label maps, computed from
/// whole-image statistics over valid pixels only. Labels are normalized to
/// label/(num_classes-1) in [0,1]. Result lies in [-1, 1].
/// Throws EmptyInputError when no pixel is valid.
double global_ssim(const LabelMap& a, const LabelMap& b, const ValidityMask& valid,
                   const SsimParams& params, int num_classes);

/// Convenience overload: every pixel valid.
double global_ssim(const LabelMap& a, const LabelMap& b, const SsimParams& params,
                   int num_classes);

/// For each consecutive frame pair (t, t+1): estimate the reverse flow
/// OF(x_{t+1}, x_t), backward-warp y_t onto frame t+1, and score the warped
/// map against y_{t+1} over valid pixels. The video score is the mean over
/// all pairs; single-frame videos score 1.0 with pairs_scored = 0.
VideoScore temporal_consistency_score(const std::string& video_id,
                                      const std::string& candidate_id,
                                      const std::vector<GrayFrame>& frames,
                                      const std::vector<LabelMap>& labels,
                                      const flow::FarnebackParams& fb,
                                      const SsimParams& ssim, int num_classes);

/// Per-video winner: the candidate with strictly higher score; exact ties go
/// to the first-listed candidate (a). Both sides must cover the same video
/// ids. Returns video_id -> winning candidate_id.
std::map<std::string, std::string> select_per_video(const std::vector<VideoScore>& scores_a,
                                                    const std::vector<VideoScore>& scores_b);

}  // namespace vseg::consistency
