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

#include "vseg/tta.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vseg/kernels.hpp"

namespace vseg::tta {

std::vector<AugSpec> default_ensemble() {
  std::vector<AugSpec> augs;
  int rank = 0;
  for (double scale : {1.2, 1.1, 1.0, 0.9}) {
    augs.push_back({scale, false, rank++});
    augs.push_back({scale, true, rank++});
  }
  return augs;
}

LabelMap flip_horizontal(const LabelMap& src) {
  LabelMap dst = LabelMap::create(src.width, src.height, src.num_classes);
  for (int y = 0; y < src.height; ++y) {
    const uint16_t* in = src.row(y);
    uint16_t* out = dst.row(y);
    for (int x = 0; x < src.width; ++x) {
      out[x] = in[src.width - 1 - x];
    }
  }
  return dst;
}

LabelMap resize_nearest(const LabelMap& src, int dst_width, int dst_height) {
  if (dst_width <= 0 || dst_height <= 0) {
    throw InvalidInputError("resize_nearest: target dimensions must be positive");
  }
  if (src.width == dst_width && src.height == dst_height) return src;

  LabelMap dst = LabelMap::create(dst_width, dst_height, src.num_classes);
  for (int y = 0; y < dst_height; ++y) {
    const int sy = std::min(src.height - 1,
                            static_cast<int>((y + 0.5) * src.height / dst_height));
    const uint16_t* in = src.row(sy);
    uint16_t* out = dst.row(y);
    for (int x = 0; x < dst_width; ++x) {
      const int sx = std::min(src.width - 1,
                              static_cast<int>((x + 0.5) * src.width / dst_width));
      out[x] = in[sx];
    }
  }
  return dst;
}

LabelMap normalize_prediction(const EnsemblePrediction& pred, int base_width,
                              int base_height) {
  const int expect_w = static_cast<int>(std::lround(base_width * pred.aug.scale));
  const int expect_h = static_cast<int>(std::lround(base_height * pred.aug.scale));
  if (std::abs(pred.labels.width - expect_w) > 1 ||
      std::abs(pred.labels.height - expect_h) > 1) {
    throw InvalidInputError(
        "normalize_prediction: prediction is " + std::to_string(pred.labels.width) + "x" +
        std::to_string(pred.labels.height) + " but scale " + std::to_string(pred.aug.scale) +
        " of " + std::to_string(base_width) + "x" + std::to_string(base_height) +
        " expects " + std::to_string(expect_w) + "x" + std::to_string(expect_h));
  }
  const LabelMap& upright = pred.aug.flipped ? flip_horizontal(pred.labels) : pred.labels;
  return resize_nearest(upright, base_width, base_height);
}

LabelMap majority_vote(const std::vector<std::pair<LabelMap, AugSpec>>& preds) {
  if (preds.empty()) throw InvalidInputError("majority_vote: empty ensemble");
  const LabelMap& first = preds.front().first;
  std::set<int> ranks;
  for (const auto& [map, aug] : preds) {
    if (!same_dims(map.width, map.height, first.width, first.height)) {
      throw InvalidInputError("majority_vote: ensemble dimensions differ");
    }
    if (!ranks.insert(aug.precedence_rank).second) {
      throw InvalidInputError("majority_vote: duplicate precedence rank " +
                              std::to_string(aug.precedence_rank));
    }
  }

  // The vote kernel resolves ties by scan order, so order maps by rank.
  std::vector<int> order(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    return preds[lhs].second.precedence_rank < preds[rhs].second.precedence_rank;
  });
  std::vector<const uint16_t*> maps;
  maps.reserve(preds.size());
  for (int i : order) maps.push_back(preds[i].first.data.data());

  LabelMap out = LabelMap::create(first.width, first.height, first.num_classes);
  kernels::vote_mode_u16(maps.data(), static_cast<int>(maps.size()), out.pixel_count(),
                         out.data.data());
  return out;
}

}  // namespace vseg::tta
