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

#include "vseg/consistency.hpp"

#include <set>

#include "vseg/kernels.hpp"

namespace vseg::consistency {

void SsimParams::validate() const {
  if (!(k1 > 0.0) || !(k2 > 0.0)) {
    throw InvalidInputError("SsimParams: k1 and k2 must be > 0");
  }
  if (!(dynamic_range > 0.0)) {
    throw InvalidInputError("SsimParams: dynamic_range must be > 0");
  }
}

double global_ssim(const LabelMap& a, const LabelMap& b, const ValidityMask& valid,
                   const SsimParams& params, int num_classes) {
  params.validate();
  if (num_classes < 2) throw InvalidInputError("global_ssim: num_classes must be >= 2");
  if (!same_dims(a.width, a.height, b.width, b.height) ||
      !same_dims(a.width, a.height, valid.width, valid.height)) {
    throw InvalidInputError("global_ssim: dimension mismatch");
  }

  // All moments derive from exact integer sums over the raw labels, so the
  // result is independent of traversal order, kernel backend and threading.
  const kernels::LabelPairStats s = kernels::label_pair_stats_u16(
      a.data.data(), b.data.data(), valid.data.data(), a.pixel_count());
  if (s.count == 0) throw EmptyInputError("global_ssim: no valid pixels");

  const double n = static_cast<double>(s.count);
  const double norm = 1.0 / (num_classes - 1);
  const double mu_a = static_cast<double>(s.sum_a) / n * norm;
  const double mu_b = static_cast<double>(s.sum_b) / n * norm;
  // Population variance (divide by N).
  const double var_a = static_cast<double>(s.sum_aa) / n * norm * norm - mu_a * mu_a;
  const double var_b = static_cast<double>(s.sum_bb) / n * norm * norm - mu_b * mu_b;
  const double cov = static_cast<double>(s.sum_ab) / n * norm * norm - mu_a * mu_b;

  const double c1 = params.c1();
  const double c2 = params.c2();
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

double global_ssim(const LabelMap& a, const LabelMap& b, const SsimParams& params,
                   int num_classes) {
  return global_ssim(a, b, ValidityMask::create(a.width, a.height, 1), params, num_classes);
}

VideoScore temporal_consistency_score(const std::string& video_id,
                                      const std::string& candidate_id,
                                      const std::vector<GrayFrame>& frames,
                                      const std::vector<LabelMap>& labels,
                                      const flow::FarnebackParams& fb,
                                      const SsimParams& ssim, int num_classes) {
  if (frames.empty() || frames.size() != labels.size()) {
    throw InvalidInputError("temporal_consistency_score: frame/label count mismatch");
  }
  for (size_t t = 0; t < frames.size(); ++t) {
    if (!same_dims(frames[t].width, frames[t].height, frames[0].width, frames[0].height) ||
        !same_dims(labels[t].width, labels[t].height, frames[0].width, frames[0].height)) {
      throw InvalidInputError("temporal_consistency_score: non-uniform dimensions");
    }
  }

  VideoScore result{video_id, candidate_id, 1.0, 0};
  if (frames.size() == 1) return result;

  double total = 0.0;
  const int pairs = static_cast<int>(frames.size()) - 1;
  for (int t = 0; t < pairs; ++t) {
    // Reverse flow: for each pixel of frame t+1, where it came from in
    // frame t. Backward-warping y_t along it leaves no holes.
    const FlowField reverse = flow::farneback_flow(frames[t + 1], frames[t], fb);
    const flow::WarpResult warped = flow::warp_labels(labels[t], reverse);
    kernels::LabelPairStats probe = kernels::label_pair_stats_u16(
        warped.labels.data.data(), labels[t + 1].data.data(),
        warped.validity.data.data(), warped.labels.pixel_count());
    if (probe.count == 0) {
      // Warp escaped the image entirely; nothing is verifiable for this pair.
      total += 0.0;
    } else {
      total += global_ssim(warped.labels, labels[t + 1], warped.validity, ssim, num_classes);
    }
  }
  result.score = total / pairs;
  result.pairs_scored = pairs;
  return result;
}

std::map<std::string, std::string> select_per_video(const std::vector<VideoScore>& scores_a,
                                                    const std::vector<VideoScore>& scores_b) {
  std::map<std::string, const VideoScore*> by_id_a;
  std::map<std::string, const VideoScore*> by_id_b;
  for (const VideoScore& s : scores_a) by_id_a[s.video_id] = &s;
  for (const VideoScore& s : scores_b) by_id_b[s.video_id] = &s;
  if (by_id_a.size() != scores_a.size() || by_id_b.size() != scores_b.size()) {
    throw InvalidInputError("select_per_video: duplicate video id");
  }
  if (by_id_a.size() != by_id_b.size()) {
    throw InvalidInputError("select_per_video: candidate video sets differ in size");
  }

  std::map<std::string, std::string> selection;
  for (const auto& [id, sa] : by_id_a) {
    auto it = by_id_b.find(id);
    if (it == by_id_b.end()) {
      throw InvalidInputError("select_per_video: video " + id + " missing from candidate b");
    }
    const VideoScore* sb = it->second;
    // Ties go to the first-listed candidate.
    selection[id] = (sb->score > sa->score) ? sb->candidate_id : sa->candidate_id;
  }
  return selection;
}

}  // namespace vseg::consistency
