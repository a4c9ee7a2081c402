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

#include <cmath>

#include "vseg/flow.hpp"

namespace vseg::flow {

WarpResult warp_labels(const LabelMap& labels, const FlowField& flow_next_to_prev,
                       uint16_t ignore_label) {
  if (!same_dims(labels.width, labels.height, flow_next_to_prev.width,
                 flow_next_to_prev.height)) {
    throw InvalidInputError("warp_labels: label and flow dimensions differ");
  }
  const int w = labels.width;
  const int h = labels.height;

  WarpResult result{LabelMap::create(w, h, labels.num_classes, ignore_label),
                    ValidityMask::create(w, h, 0)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      // round(v) = floor(v + 0.5), evaluated in double so large flow values
      // cannot overflow the int conversion before the bounds check.
      const double sx = std::floor(x + static_cast<double>(flow_next_to_prev.data[2 * idx]) + 0.5);
      const double sy = std::floor(y + static_cast<double>(flow_next_to_prev.data[2 * idx + 1]) + 0.5);
      if (sx < 0.0 || sx >= w || sy < 0.0 || sy >= h) continue;
      result.labels.data[idx] = labels.at(static_cast<int>(sx), static_cast<int>(sy));
      result.validity.data[idx] = 1;
    }
  }
  return result;
}

}  // namespace vseg::flow
