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

#include "vseg/image.hpp"

#include <algorithm>
#include <unordered_set>

namespace vseg {

namespace {
void require_positive_dims(int w, int h, const char* what) {
  if (w <= 0 || h <= 0) {
    throw InvalidInputError(std::string(what) + ": dimensions must be positive, got " +
                            std::to_string(w) + "x" + std::to_string(h));
  }
}
}  // namespace

RgbFrame RgbFrame::create(int w, int h) {
  require_positive_dims(w, h, "RgbFrame");
  RgbFrame f;
  f.width = w;
  f.height = h;
  f.data.assign(static_cast<size_t>(w) * h * 3, 0);
  return f;
}

GrayFrame GrayFrame::create(int w, int h, float fill) {
  require_positive_dims(w, h, "GrayFrame");
  if (!(fill >= 0.0f && fill <= 1.0f)) {
    throw InvalidInputError("GrayFrame: fill value outside [0,1]");
  }
  GrayFrame f;
  f.width = w;
  f.height = h;
  f.data.assign(static_cast<size_t>(w) * h, fill);
  return f;
}

GrayFrame GrayFrame::create(int w, int h, std::vector<float> values) {
  require_positive_dims(w, h, "GrayFrame");
  if (values.size() != static_cast<size_t>(w) * h) {
    throw InvalidInputError("GrayFrame: buffer size does not match dimensions");
  }
  for (float v : values) {
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw InvalidInputError("GrayFrame: intensity outside [0,1] or non-finite");
    }
  }
  GrayFrame f;
  f.width = w;
  f.height = h;
  f.data = std::move(values);
  return f;
}

LabelMap LabelMap::create(int w, int h, int num_classes, uint16_t fill) {
  require_positive_dims(w, h, "LabelMap");
  LabelMap m;
  m.width = w;
  m.height = h;
  m.num_classes = num_classes;
  m.data.assign(static_cast<size_t>(w) * h, fill);
  return m;
}

ValidityMask ValidityMask::create(int w, int h, uint8_t fill) {
  require_positive_dims(w, h, "ValidityMask");
  ValidityMask m;
  m.width = w;
  m.height = h;
  m.data.assign(static_cast<size_t>(w) * h, fill);
  return m;
}

FlowField FlowField::create(int w, int h) {
  require_positive_dims(w, h, "FlowField");
  FlowField f;
  f.width = w;
  f.height = h;
  f.data.assign(static_cast<size_t>(w) * h * 2, 0.0f);
  return f;
}

GrayFrame to_gray(const RgbFrame& rgb) {
  GrayFrame g = GrayFrame::create(rgb.width, rgb.height);
  const uint8_t* src = rgb.data.data();
  float* dst = g.data.data();
  const size_t n = rgb.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    const float luma =
        0.299f * src[3 * i] + 0.587f * src[3 * i + 1] + 0.114f * src[3 * i + 2];
    dst[i] = std::clamp(luma / 255.0f, 0.0f, 1.0f);
  }
  return g;
}

void validate_labels(const LabelMap& labels, int num_classes,
                     const std::vector<uint16_t>& ignore_labels) {
  std::unordered_set<uint16_t> ignore(ignore_labels.begin(), ignore_labels.end());
  for (uint16_t v : labels.data) {
    if (v >= num_classes && !ignore.count(v)) {
      throw InvalidInputError("label value " + std::to_string(v) +
                              " outside [0," + std::to_string(num_classes) +
                              ") and not an ignore label");
    }
  }
}

}  // namespace vseg
