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
// Masked-consistency utilities: block-structured random masks, mask
// application, predictions on masked frames via a pluggable segmenter, and
// the clean+masked loss combination.

#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "vseg/image.hpp"

namespace vseg::mvc {

struct MaskParams {
  int patch_size = 32;      // block edge in pixels, >= 1
  double mask_ratio = 0.5;  // expected dropped fraction, in [0,1]
  double lambda = 1.0;      // masked-loss weight, >= 0
  uint64_t seed = 0;

  void validate() const;
};

/// Block-structured keep/drop mask. grid cell value 1 = kept, 0 = dropped;
/// every pixel of a patch_size x patch_size block shares its cell's value
/// (edge blocks truncated). The expected dropped fraction is mask_ratio.
struct PatchMask {
  int width = 0;        // pixel dimensions the mask covers
  int height = 0;
  int patch_size = 1;
  int grid_width = 0;   // ceil(width / patch_size)
  int grid_height = 0;  // ceil(height / patch_size)
  std::vector<uint8_t> grid;  // grid_width * grid_height, 1 = kept

  bool cell(int gx, int gy) const { return grid[static_cast<size_t>(gy) * grid_width + gx] != 0; }
  bool pixel_kept(int x, int y) const { return cell(x / patch_size, y / patch_size); }
  /// Fraction of grid cells kept.
  double kept_fraction() const;
};

/// Deterministic stream key for (video, frame) so masks depend only on the
/// key, never on evaluation order or thread scheduling.
uint64_t frame_stream_id(const std::string& video_id, int frame_index);

/// Draw one cell value per grid position from a counter-based uniform stream
/// keyed by (seed, stream_id, cell row, cell column): kept iff v > mask_ratio.
PatchMask sample_patch_mask(int width, int height, const MaskParams& params,
                            uint64_t stream_id);

/// Element-wise product of mask and image: pixels in dropped blocks become 0
/// in every channel, kept pixels are copied bit-identically.
RgbFrame apply_mask(const RgbFrame& frame, const PatchMask& mask);

/// Segmentation backend contract. Implementations must keep output dimensions
/// equal to input dimensions and return finite, non-negative losses.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<LabelMap> predict(const std::vector<RgbFrame>& frames) const = 0;
  /// Mean per-pixel loss of predictions on `frames` against `ground_truth`.
  virtual double pixel_loss(const std::vector<RgbFrame>& frames,
                            const std::vector<LabelMap>& ground_truth) const = 0;
};

/// Desk-scale segmenter: per-class RGB centroids, prediction by nearest
/// centroid, loss = cross-entropy of a softmax over negative squared
/// distances with the given temperature.
class ToyCentroidSegmenter : public Predictor {
 public:
  ToyCentroidSegmenter(std::vector<std::array<float, 3>> centroids, float temperature);

  std::vector<LabelMap> predict(const std::vector<RgbFrame>& frames) const override;
  double pixel_loss(const std::vector<RgbFrame>& frames,
                    const std::vector<LabelMap>& ground_truth) const override;
  int num_classes() const { return static_cast<int>(centroids_.size()); }

 private:
  std::vector<std::array<float, 3>> centroids_;
  float temperature_;
};

/// Mask every frame independently (stream derived from video_id and frame
/// index) and run the predictor on the masked frames.
std::vector<LabelMap> masked_prediction(const Predictor& predictor,
                                        const std::vector<RgbFrame>& frames,
                                        const MaskParams& params,
                                        const std::string& video_id);

/// (1/N) * sum_k (clean_k + lambda * masked_k).
double combine_losses(const std::vector<double>& clean_losses,
                      const std::vector<double>& masked_losses, double lambda);

}  // namespace vseg::mvc
