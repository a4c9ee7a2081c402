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

#include "vseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nlohmann/json.hpp"
#include "vseg/common.hpp"

namespace vseg::metrics {

ConfusionMatrix ConfusionMatrix::create(int num_classes) {
  if (num_classes < 1) {
    throw InvalidInputError("ConfusionMatrix: num_classes must be >= 1");
  }
  ConfusionMatrix cm;
  cm.num_classes = num_classes;
  cm.counts.assign(static_cast<size_t>(num_classes) * (num_classes + 1), 0);
  return cm;
}

uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes != num_classes) {
    throw InvalidInputError("ConfusionMatrix::merge: class count mismatch");
  }
  for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

void confusion_update(ConfusionMatrix& cm, const LabelMap& pred, const LabelMap& gt,
                      const std::set<uint16_t>& ignore_labels) {
  if (!same_dims(pred.width, pred.height, gt.width, gt.height)) {
    throw InvalidInputError("confusion_update: prediction/ground-truth dimension mismatch");
  }
  const size_t n = gt.data.size();
  for (size_t i = 0; i < n; ++i) {
    const uint16_t g = gt.data[i];
    if (ignore_labels.count(g)) continue;
    if (g >= cm.num_classes) {
      throw InvalidInputError("confusion_update: ground-truth label " + std::to_string(g) +
                              " out of range for " + std::to_string(cm.num_classes) +
                              " classes");
    }
    const uint16_t p = pred.data[i];
    if (ignore_labels.count(p)) {
      cm.at(g, cm.ignored_pred_column()) += 1;
      continue;
    }
    if (p >= cm.num_classes) {
      throw InvalidInputError("confusion_update: predicted label " + std::to_string(p) +
                              " out of range for " + std::to_string(cm.num_classes) +
                              " classes");
    }
    cm.at(g, p) += 1;
  }
}

std::pair<std::map<uint16_t, double>, double> miou(const ConfusionMatrix& cm) {
  std::map<uint16_t, double> per_class;
  double sum = 0.0;
  for (int c = 0; c < cm.num_classes; ++c) {
    uint64_t tp = cm.at(c, c);
    uint64_t row = 0;  // TP + FN (includes ignore-valued predictions)
    for (int j = 0; j <= cm.num_classes; ++j) row += cm.at(c, j);
    uint64_t col = 0;  // TP + FP
    for (int r = 0; r < cm.num_classes; ++r) col += cm.at(r, c);
    const uint64_t uni = row + col - tp;
    if (uni == 0) continue;  // class absent from both sides
    const double iou = static_cast<double>(tp) / static_cast<double>(uni);
    per_class[static_cast<uint16_t>(c)] = iou;
    sum += iou;
  }
  if (per_class.empty()) {
    throw EmptyInputError("miou: every class has zero union (no scored pixels)");
  }
  return {std::move(per_class), sum / static_cast<double>(per_class.size())};
}

std::optional<double> video_consistency(const std::vector<LabelMap>& preds,
                                        const std::vector<LabelMap>& gts, int k,
                                        const std::set<uint16_t>& ignore_labels) {
  if (k < 1) throw InvalidInputError("video_consistency: window size must be >= 1");
  if (preds.size() != gts.size()) {
    throw InvalidInputError("video_consistency: prediction/ground-truth frame count mismatch");
  }
  const int frames = static_cast<int>(preds.size());
  if (frames < k) {
    throw InvalidInputError("video_consistency: need at least " + std::to_string(k) +
                            " frames, got " + std::to_string(frames));
  }
  const int width = gts[0].width;
  const int height = gts[0].height;
  for (int t = 0; t < frames; ++t) {
    if (!same_dims(preds[t].width, preds[t].height, width, height) ||
        !same_dims(gts[t].width, gts[t].height, width, height)) {
      throw InvalidInputError("video_consistency: non-uniform frame dimensions");
    }
  }

  const size_t n = static_cast<size_t>(width) * height;
  double window_sum = 0.0;
  int windows_scored = 0;
  for (int start = 0; start + k <= frames; ++start) {
    uint64_t stable = 0;
    uint64_t correct = 0;
    for (size_t i = 0; i < n; ++i) {
      const uint16_t g0 = gts[start].data[i];
      if (ignore_labels.count(g0)) continue;
      bool is_stable = true;
      bool all_correct = preds[start].data[i] == g0;
      for (int t = start + 1; t < start + k; ++t) {
        if (gts[t].data[i] != g0) {
          is_stable = false;
          break;
        }
        if (preds[t].data[i] != g0) all_correct = false;
      }
      if (!is_stable) continue;
      ++stable;
      if (all_correct) ++correct;
    }
    if (stable == 0) continue;
    window_sum += static_cast<double>(correct) / static_cast<double>(stable);
    ++windows_scored;
  }
  if (windows_scored == 0) return std::nullopt;
  return window_sum / windows_scored;
}

const std::set<uint16_t>& default_ignore_labels() {
  static const std::set<uint16_t> kIgnore{255};
  return kIgnore;
}

const std::set<int>& default_vc_window_sizes() {
  static const std::set<int> kWindows{8, 16};
  return kWindows;
}

MetricReport evaluate_dataset(const std::vector<VideoEval>& videos, int num_classes,
                              const std::set<int>& ks,
                              const std::set<uint16_t>& ignore_labels) {
  if (videos.empty()) throw EmptyInputError("evaluate_dataset: no videos");

  ConfusionMatrix cm = ConfusionMatrix::create(num_classes);
  for (const VideoEval& video : videos) {
    if (video.preds.size() != video.gts.size()) {
      throw InvalidInputError("evaluate_dataset: prediction/ground-truth frame count mismatch");
    }
    for (size_t t = 0; t < video.preds.size(); ++t) {
      confusion_update(cm, video.preds[t], video.gts[t], ignore_labels);
    }
  }

  MetricReport report;
  auto [per_class, mean] = miou(cm);
  report.per_class_iou = std::move(per_class);
  report.miou = mean;

  for (int k : ks) {
    if (k < 1) throw InvalidInputError("evaluate_dataset: window size must be >= 1");
    double sum = 0.0;
    int64_t scored = 0;
    for (const VideoEval& video : videos) {
      if (static_cast<int>(video.preds.size()) < k) continue;
      const std::optional<double> vc =
          video_consistency(video.preds, video.gts, k, ignore_labels);
      if (!vc) continue;  // every window skipped: no stable pixels anywhere
      sum += *vc;
      ++scored;
    }
    report.videos_scored[k] = scored;
    if (scored > 0) report.mvc[k] = sum / static_cast<double>(scored);
  }
  return report;
}

std::string MetricReport::to_json() const {
  nlohmann::json j;
  j["miou"] = miou;
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [cls, iou] : per_class_iou) per_class[std::to_string(cls)] = iou;
  j["per_class_iou"] = std::move(per_class);
  nlohmann::json mvc_obj = nlohmann::json::object();
  for (const auto& [k, value] : mvc) mvc_obj[std::to_string(k)] = value;
  j["mvc"] = std::move(mvc_obj);
  nlohmann::json scored_obj = nlohmann::json::object();
  for (const auto& [k, count] : videos_scored) scored_obj[std::to_string(k)] = count;
  j["videos_scored"] = std::move(scored_obj);
  return j.dump(2) + "\n";
}

MetricReport MetricReport::from_json(const std::string& text) {
  MetricReport report;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    report.miou = j.at("miou").get<double>();
    for (const auto& [key, value] : j.at("per_class_iou").items()) {
      report.per_class_iou[static_cast<uint16_t>(std::stoi(key))] = value.get<double>();
    }
    for (const auto& [key, value] : j.at("mvc").items()) {
      report.mvc[std::stoi(key)] = value.get<double>();
    }
    for (const auto& [key, value] : j.at("videos_scored").items()) {
      report.videos_scored[std::stoi(key)] = value.get<int64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("MetricReport: malformed JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw FormatError("MetricReport: non-numeric key in JSON report");
  }
  return report;
}

}  // namespace vseg::metrics
