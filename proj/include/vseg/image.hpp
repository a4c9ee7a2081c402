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

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "vseg/common.hpp"

namespace vseg {

/// 8-bit interleaved RGB image, row-major.
struct RgbFrame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // 3 * width * height

  static RgbFrame create(int w, int h);
  uint8_t* pixel(int x, int y) { return data.data() + 3 * (static_cast<size_t>(y) * width + x); }
  const uint8_t* pixel(int x, int y) const {
    return data.data() + 3 * (static_cast<size_t>(y) * width + x);
  }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Single-channel float image with intensities in [0, 1]. The optical-flow
/// front end consumes these.
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // width * height

  static GrayFrame create(int w, int h, float fill = 0.0f);
  /// Validating constructor-from-buffer: rejects non-finite values and values
  /// outside [0, 1].
  static GrayFrame create(int w, int h, std::vector<float> values);

  float at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  const float* row(int y) const { return data.data() + static_cast<size_t>(y) * width; }
  float* row(int y) { return data.data() + static_cast<size_t>(y) * width; }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Per-pixel class indices. num_classes is carried for validation and for
/// SSIM normalization; 0 means "not specified".
struct LabelMap {
  int width = 0;
  int height = 0;
  int num_classes = 0;
  std::vector<uint16_t> data;  // width * height

  static LabelMap create(int w, int h, int num_classes, uint16_t fill = 0);

  uint16_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  uint16_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  const uint16_t* row(int y) const { return data.data() + static_cast<size_t>(y) * width; }
  uint16_t* row(int y) { return data.data() + static_cast<size_t>(y) * width; }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Companion mask for a LabelMap: nonzero = pixel carries a trustworthy label.
struct ValidityMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  static ValidityMask create(int w, int h, uint8_t fill = 1);

  bool at(int x, int y) const { return data[static_cast<size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { data[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// Dense displacement field, interleaved (dx, dy) pairs in pixel units.
/// Convention: source(p) corresponds to target(p + flow(p)).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // 2 * width * height

  static FlowField create(int w, int h);

  float dx(int x, int y) const { return data[2 * (static_cast<size_t>(y) * width + x)]; }
  float dy(int x, int y) const { return data[2 * (static_cast<size_t>(y) * width + x) + 1]; }
  void set(int x, int y, float fx, float fy) {
    data[2 * (static_cast<size_t>(y) * width + x)] = fx;
    data[2 * (static_cast<size_t>(y) * width + x) + 1] = fy;
  }
  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
};

/// ITU-R BT.601 luma, normalized to [0, 1].
GrayFrame to_gray(const RgbFrame& rgb);

/// Throws InvalidInputError if any non-ignored label is >= num_classes.
void validate_labels(const LabelMap& labels, int num_classes,
                     const std::vector<uint16_t>& ignore_labels);

inline bool same_dims(int w1, int h1, int w2, int h2) { return w1 == w2 && h1 == h2; }

}  // namespace vseg
