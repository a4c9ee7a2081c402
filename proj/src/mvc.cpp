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

#include "vseg/mvc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace vseg::mvc {

void MaskParams::validate() const {
  if (patch_size < 1) throw InvalidInputError("MaskParams: patch_size must be >= 1");
  if (!(mask_ratio >= 0.0 && mask_ratio <= 1.0)) {
    throw InvalidInputError("MaskParams: mask_ratio must be in [0,1]");
  }
  if (!(lambda >= 0.0)) throw InvalidInputError("MaskParams: lambda must be >= 0");
}

double PatchMask::kept_fraction() const {
  if (grid.empty()) return 0.0;
  size_t kept = 0;
  for (uint8_t c : grid) kept += c ? 1 : 0;
  return static_cast<double>(kept) / grid.size();
}

uint64_t frame_stream_id(const std::string& video_id, int frame_index) {
  return hash_combine(fnv1a(video_id), static_cast<uint64_t>(frame_index));
}

PatchMask sample_patch_mask(int width, int height, const MaskParams& params,
                            uint64_t stream_id) {
  params.validate();
  if (width < 1 || height < 1) {
    throw InvalidInputError("sample_patch_mask: dimensions must be >= 1");
  }

  PatchMask mask;
  mask.width = width;
  mask.height = height;
  mask.patch_size = params.patch_size;
  mask.grid_width = (width + params.patch_size - 1) / params.patch_size;
  mask.grid_height = (height + params.patch_size - 1) / params.patch_size;
  mask.grid.resize(static_cast<size_t>(mask.grid_width) * mask.grid_height);

  const uint64_t base = hash_combine(params.seed, stream_id);
  for (int gy = 0; gy < mask.grid_height; ++gy) {
    for (int gx = 0; gx < mask.grid_width; ++gx) {
      const uint64_t key =
          hash_combine(base, (static_cast<uint64_t>(gy) << 32) | static_cast<uint32_t>(gx));
      const double v = unit_open(key);
      // Iverson bracket [v > r]: cell kept with probability 1 - mask_ratio.
      mask.grid[static_cast<size_t>(gy) * mask.grid_width + gx] =
          (v > params.mask_ratio) ? 1 : 0;
    }
  }
  return mask;
}

RgbFrame apply_mask(const RgbFrame& frame, const PatchMask& mask) {
  if (!same_dims(frame.width, frame.height, mask.width, mask.height)) {
    throw InvalidInputError("apply_mask: mask does not cover frame dimensions");
  }
  RgbFrame out = frame;
  for (int gy = 0; gy < mask.grid_height; ++gy) {
    const int y0 = gy * mask.patch_size;
    const int y1 = std::min(frame.height, y0 + mask.patch_size);
    for (int gx = 0; gx < mask.grid_width; ++gx) {
      if (mask.cell(gx, gy)) continue;
      const int x0 = gx * mask.patch_size;
      const int x1 = std::min(frame.width, x0 + mask.patch_size);
      for (int y = y0; y < y1; ++y) {
        std::memset(out.pixel(x0, y), 0, static_cast<size_t>(x1 - x0) * 3);
      }
    }
  }
  return out;
}

ToyCentroidSegmenter::ToyCentroidSegmenter(std::vector<std::array<float, 3>> centroids,
                                           float temperature)
    : centroids_(std::move(centroids)), temperature_(temperature) {
  if (centroids_.empty()) {
    throw InvalidInputError("ToyCentroidSegmenter: needs at least one centroid");
  }
  if (!(temperature_ > 0.0f)) {
    throw InvalidInputError("ToyCentroidSegmenter: temperature must be > 0");
  }
}

std::vector<LabelMap> ToyCentroidSegmenter::predict(
    const std::vector<RgbFrame>& frames) const {
  std::vector<LabelMap> out;
  out.reserve(frames.size());
  for (const RgbFrame& frame : frames) {
    LabelMap labels = LabelMap::create(frame.width, frame.height, num_classes());
    const size_t n = frame.pixel_count();
    for (size_t i = 0; i < n; ++i) {
      const uint8_t* px = frame.data.data() + 3 * i;
      float best = std::numeric_limits<float>::max();
      uint16_t best_class = 0;
      for (size_t c = 0; c < centroids_.size(); ++c) {
        const float dr = px[0] - centroids_[c][0];
        const float dg = px[1] - centroids_[c][1];
        const float db = px[2] - centroids_[c][2];
        const float d2 = dr * dr + dg * dg + db * db;
        if (d2 < best) {
          best = d2;
          best_class = static_cast<uint16_t>(c);
        }
      }
      labels.data[i] = best_class;
    }
    out.push_back(std::move(labels));
  }
  return out;
}

double ToyCentroidSegmenter::pixel_loss(const std::vector<RgbFrame>& frames,
                                        const std::vector<LabelMap>& ground_truth) const {
  if (frames.size() != ground_truth.size() || frames.empty()) {
    throw InvalidInputError("pixel_loss: frame/label count mismatch");
  }
  double total = 0.0;
  size_t pixels = 0;
  std::vector<double> logits(centroids_.size());
  for (size_t f = 0; f < frames.size(); ++f) {
    const RgbFrame& frame = frames[f];
    const LabelMap& gt = ground_truth[f];
    if (!same_dims(frame.width, frame.height, gt.width, gt.height)) {
      throw InvalidInputError("pixel_loss: frame/label dimension mismatch");
    }
    const size_t n = frame.pixel_count();
    for (size_t i = 0; i < n; ++i) {
      const uint8_t* px = frame.data.data() + 3 * i;
      double max_logit = -std::numeric_limits<double>::max();
      for (size_t c = 0; c < centroids_.size(); ++c) {
        const double dr = px[0] - centroids_[c][0];
        const double dg = px[1] - centroids_[c][1];
        const double db = px[2] - centroids_[c][2];
        logits[c] = -(dr * dr + dg * dg + db * db) / temperature_;
        max_logit = std::max(max_logit, logits[c]);
      }
      double denom = 0.0;
      for (double l : logits) denom += std::exp(l - max_logit);
      const uint16_t label = gt.data[i];
      if (label >= centroids_.size()) {
        throw InvalidInputError("pixel_loss: ground-truth label " + std::to_string(label) +
                                " out of range");
      }
      // Cross-entropy: -log softmax(logit of the true class).
      total += -(logits[label] - max_logit - std::log(denom));
      ++pixels;
    }
  }
  return total / static_cast<double>(pixels);
}

std::vector<LabelMap> masked_prediction(const Predictor& predictor,
                                        const std::vector<RgbFrame>& frames,
                                        const MaskParams& params,
                                        const std::string& video_id) {
  if (frames.empty()) throw InvalidInputError("masked_prediction: no frames");
  for (const RgbFrame& f : frames) {
    if (!same_dims(f.width, f.height, frames[0].width, frames[0].height)) {
      throw InvalidInputError("masked_prediction: non-uniform frame dimensions");
    }
  }
  std::vector<RgbFrame> masked;
  masked.reserve(frames.size());
  for (size_t t = 0; t < frames.size(); ++t) {
    const PatchMask mask =
        sample_patch_mask(frames[t].width, frames[t].height, params,
                          frame_stream_id(video_id, static_cast<int>(t)));
    masked.push_back(apply_mask(frames[t], mask));
  }
  return predictor.predict(masked);
}

double combine_losses(const std::vector<double>& clean_losses,
                      const std::vector<double>& masked_losses, double lambda) {
  if (clean_losses.empty() || clean_losses.size() != masked_losses.size()) {
    throw InvalidInputError("combine_losses: loss lists must be non-empty and equal length");
  }
  double total = 0.0;
  for (size_t k = 0; k < clean_losses.size(); ++k) {
    const double clean = clean_losses[k];
    const double masked = masked_losses[k];
    if (!std::isfinite(clean) || clean < 0.0 || !std::isfinite(masked) || masked < 0.0) {
      throw InvalidInputError("combine_losses: losses must be finite and >= 0");
    }
    total += clean + lambda * masked;
  }
  return total / static_cast<double>(clean_losses.size());
}

}  // namespace vseg::mvc
