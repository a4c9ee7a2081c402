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
// Segmentation evaluation: per-class IoU / mIoU from a global confusion
// matrix, and sliding-window video consistency (VC_k / mVC_k).

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vseg/image.hpp"

namespace vseg::metrics {

/// Pixel tally matrix: row = ground-truth class, column = predicted class.
/// One extra column (index num_classes) tallies pixels whose prediction
/// carried an ignore value while the ground truth was a real class; those
/// pixels are misses for the ground-truth class (false negatives) but false
/// positives for no class.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<uint64_t> counts;  // num_classes * (num_classes + 1), row-major

  static ConfusionMatrix create(int num_classes);

  uint64_t& at(int gt, int pred) {
    return counts[static_cast<size_t>(gt) * (num_classes + 1) + pred];
  }
  uint64_t at(int gt, int pred) const {
    return counts[static_cast<size_t>(gt) * (num_classes + 1) + pred];
  }
  /// Column index used for ignore-valued predictions.
  int ignored_pred_column() const { return num_classes; }

  uint64_t total() const;
  /// Elementwise addition; dimensions must match.
  void merge(const ConfusionMatrix& other);
};

/// Tally one frame pair into the matrix. Pixels whose ground-truth label is
/// in `ignore_labels` contribute nothing. Pixels whose prediction is in
/// `ignore_labels` land in the extra column of their ground-truth row.
/// Out-of-range labels not covered by the ignore set raise an invalid-input
/// error naming the offending value.
void confusion_update(ConfusionMatrix& cm, const LabelMap& pred, const LabelMap& gt,
                      const std::set<uint16_t>& ignore_labels);

/// Per-class IoU_c = TP_c / (TP_c + FP_c + FN_c) and their mean. Classes
/// absent from both ground truth and prediction (zero union) are excluded
/// from the map and the mean; if every class has zero union, raises an
/// empty-input error.
std::pair<std::map<uint16_t, double>, double> miou(const ConfusionMatrix& cm);

/// Video consistency over sliding windows of k consecutive frames (stride 1).
/// Per window: G = pixels whose ground-truth label is identical and
/// non-ignored across all k frames; score = fraction of G predicted correctly
/// in every frame of the window; windows with empty G are skipped. Returns
/// the mean over scored windows, or nullopt when every window was skipped.
/// Fewer than k frames (or k < 1, or dimension mismatches) raise an
/// invalid-input error.
std::optional<double> video_consistency(const std::vector<LabelMap>& preds,
                                        const std::vector<LabelMap>& gts, int k,
                                        const std::set<uint16_t>& ignore_labels);

struct VideoEval {
  std::vector<LabelMap> preds;
  std::vector<LabelMap> gts;
};

struct MetricReport {
  std::map<uint16_t, double> per_class_iou;
  double miou = 0.0;
  std::map<int, double> mvc;            // window size k -> mean per-video VC_k
  std::map<int, int64_t> videos_scored; // window size k -> videos contributing

  std::string to_json() const;
  static MetricReport from_json(const std::string& text);
};

/// Defaults used across the toolkit: void/ignore label 255, window sizes 8
/// and 16.
const std::set<uint16_t>& default_ignore_labels();
const std::set<int>& default_vc_window_sizes();

/// Dataset-level evaluation: mIoU from one confusion matrix accumulated over
/// every frame of every video; mVC_k = mean of per-video VC_k over videos
/// with at least k frames (videos where every window is skipped do not
/// contribute). videos_scored records, per k, how many videos entered the
/// mVC_k mean.
MetricReport evaluate_dataset(const std::vector<VideoEval>& videos, int num_classes,
                              const std::set<int>& ks,
                              const std::set<uint16_t>& ignore_labels);

}  // namespace vseg::metrics
