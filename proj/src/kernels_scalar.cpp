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

#include <algorithm>

#include "vseg/kernels.hpp"

namespace vseg::kernels::scalar {

// Reference implementations. The SIMD variants must reproduce these
// bit-for-bit; keep the accumulation order (taps ascending, acc += t * s)
// in sync with kernels_avx2.cpp.

void correlate_rows_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst) {
  const int taps_n = 2 * radius + 1;
  for (int y = 0; y < height; ++y) {
    const float* srow = src + static_cast<size_t>(y) * width;
    float* drow = dst + static_cast<size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      float acc = 0.0f;
      for (int i = 0; i < taps_n; ++i) {
        const int sx = std::clamp(x + i - radius, 0, width - 1);
        acc += taps[i] * srow[sx];
      }
      drow[x] = acc;
    }
  }
}

void correlate_cols_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst) {
  const int taps_n = 2 * radius + 1;
  for (int y = 0; y < height; ++y) {
    float* drow = dst + static_cast<size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      float acc = 0.0f;
      for (int i = 0; i < taps_n; ++i) {
        const int sy = std::clamp(y + i - radius, 0, height - 1);
        acc += taps[i] * src[static_cast<size_t>(sy) * width + x];
      }
      drow[x] = acc;
    }
  }
}

LabelPairStats label_pair_stats_u16(const uint16_t* a, const uint16_t* b,
                                    const uint8_t* valid, size_t n) {
  LabelPairStats s;
  for (size_t i = 0; i < n; ++i) {
    if (valid && valid[i] == 0) continue;
    const uint64_t av = a[i];
    const uint64_t bv = b[i];
    s.count += 1;
    s.sum_a += av;
    s.sum_b += bv;
    s.sum_aa += av * av;
    s.sum_bb += bv * bv;
    s.sum_ab += av * bv;
  }
  return s;
}

void vote_mode_u16(const uint16_t* const* maps, int count, size_t n, uint16_t* out) {
  for (size_t p = 0; p < n; ++p) {
    uint16_t best_label = maps[0][p];
    int best_count = 0;
    // Scanning in rank order with a strict > keeps the earliest (highest
    // precedence) map's label on ties.
    for (int i = 0; i < count; ++i) {
      const uint16_t v = maps[i][p];
      int c = 0;
      for (int j = 0; j < count; ++j) {
        c += (maps[j][p] == v) ? 1 : 0;
      }
      if (c > best_count) {
        best_count = c;
        best_label = v;
      }
    }
    out[p] = best_label;
  }
}

}  // namespace vseg::kernels::scalar
