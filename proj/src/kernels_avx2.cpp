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
// AVX2 kernel variants. This translation unit is compiled with -mavx2 and must
// only be entered after a cpuid check (see kernels.cpp). Float kernels keep
// the scalar accumulation order per output lane and use separate mul/add
// (no FMA), so results are bit-identical to the scalar reference.

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <vector>

#include "vseg/kernels.hpp"

namespace vseg::kernels::avx2 {

namespace {

// Same loop body as the scalar reference, used for borders and tails.
inline void correlate_rows_span(const float* srow, int width, const float* taps,
                                int radius, float* drow, int x0, int x1) {
  const int taps_n = 2 * radius + 1;
  for (int x = x0; x < x1; ++x) {
    float acc = 0.0f;
    for (int i = 0; i < taps_n; ++i) {
      const int sx = std::clamp(x + i - radius, 0, width - 1);
      acc += taps[i] * srow[sx];
    }
    drow[x] = acc;
  }
}

// 8 u32 lanes -> 4 u64 lanes, summed pairwise.
inline __m256i sum64_u32(__m256i v) {
  const __m256i even = _mm256_and_si256(v, _mm256_set1_epi64x(0xFFFFFFFFll));
  const __m256i odd = _mm256_srli_epi64(v, 32);
  return _mm256_add_epi64(even, odd);
}

// Lane-wise u32 products widened to u64, even and odd lanes summed.
inline __m256i mul64_u32(__m256i x, __m256i y) {
  const __m256i even = _mm256_mul_epu32(x, y);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(x, 32), _mm256_srli_epi64(y, 32));
  return _mm256_add_epi64(even, odd);
}

inline uint64_t reduce64(__m256i v) {
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

}  // namespace

void correlate_rows_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst) {
  const int taps_n = 2 * radius + 1;
  // Interior pixels [radius, width-1-radius] never clamp, so their taps read
  // contiguous memory and vectorize as shifted loads.
  const int interior_end = width - radius;  // exclusive
  for (int y = 0; y < height; ++y) {
    const float* srow = src + static_cast<size_t>(y) * width;
    float* drow = dst + static_cast<size_t>(y) * width;
    if (interior_end - radius < 8) {
      correlate_rows_span(srow, width, taps, radius, drow, 0, width);
      continue;
    }
    correlate_rows_span(srow, width, taps, radius, drow, 0, radius);
    int x = radius;
    for (; x + 8 <= interior_end; x += 8) {
      __m256 acc = _mm256_setzero_ps();
      const float* base = srow + x - radius;
      for (int i = 0; i < taps_n; ++i) {
        const __m256 t = _mm256_set1_ps(taps[i]);
        acc = _mm256_add_ps(acc, _mm256_mul_ps(t, _mm256_loadu_ps(base + i)));
      }
      _mm256_storeu_ps(drow + x, acc);
    }
    correlate_rows_span(srow, width, taps, radius, drow, x, width);
  }
}

void correlate_cols_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst) {
  const int taps_n = 2 * radius + 1;
  // Row clamping depends only on y, so every x position in a row follows the
  // same tap pattern and the full row vectorizes.
  std::vector<const float*> rows(taps_n);
  for (int y = 0; y < height; ++y) {
    for (int i = 0; i < taps_n; ++i) {
      const int sy = std::clamp(y + i - radius, 0, height - 1);
      rows[i] = src + static_cast<size_t>(sy) * width;
    }
    float* drow = dst + static_cast<size_t>(y) * width;
    int x = 0;
    for (; x + 8 <= width; x += 8) {
      __m256 acc = _mm256_setzero_ps();
      for (int i = 0; i < taps_n; ++i) {
        const __m256 t = _mm256_set1_ps(taps[i]);
        acc = _mm256_add_ps(acc, _mm256_mul_ps(t, _mm256_loadu_ps(rows[i] + x)));
      }
      _mm256_storeu_ps(drow + x, acc);
    }
    for (; x < width; ++x) {
      float acc = 0.0f;
      for (int i = 0; i < taps_n; ++i) {
        acc += taps[i] * rows[i][x];
      }
      drow[x] = acc;
    }
  }
}

LabelPairStats label_pair_stats_u16(const uint16_t* a, const uint16_t* b,
                                    const uint8_t* valid, size_t n) {
  LabelPairStats s;
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc_a = zero, acc_b = zero, acc_aa = zero, acc_bb = zero, acc_ab = zero;
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m256i a16 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    __m256i b16 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    __m256i m16;
    if (valid) {
      const __m128i v8 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(valid + i));
      m16 = _mm256_cmpgt_epi16(_mm256_cvtepu8_epi16(v8), zero);
    } else {
      m16 = _mm256_set1_epi16(-1);
    }
    s.count += std::popcount(static_cast<unsigned>(_mm256_movemask_epi8(m16))) / 2;
    a16 = _mm256_and_si256(a16, m16);
    b16 = _mm256_and_si256(b16, m16);

    const __m256i a_lo = _mm256_cvtepu16_epi32(_mm256_castsi256_si128(a16));
    const __m256i a_hi = _mm256_cvtepu16_epi32(_mm256_extracti128_si256(a16, 1));
    const __m256i b_lo = _mm256_cvtepu16_epi32(_mm256_castsi256_si128(b16));
    const __m256i b_hi = _mm256_cvtepu16_epi32(_mm256_extracti128_si256(b16, 1));

    acc_a = _mm256_add_epi64(acc_a, _mm256_add_epi64(sum64_u32(a_lo), sum64_u32(a_hi)));
    acc_b = _mm256_add_epi64(acc_b, _mm256_add_epi64(sum64_u32(b_lo), sum64_u32(b_hi)));
    acc_aa = _mm256_add_epi64(acc_aa, _mm256_add_epi64(mul64_u32(a_lo, a_lo), mul64_u32(a_hi, a_hi)));
    acc_bb = _mm256_add_epi64(acc_bb, _mm256_add_epi64(mul64_u32(b_lo, b_lo), mul64_u32(b_hi, b_hi)));
    acc_ab = _mm256_add_epi64(acc_ab, _mm256_add_epi64(mul64_u32(a_lo, b_lo), mul64_u32(a_hi, b_hi)));
  }
  s.sum_a = reduce64(acc_a);
  s.sum_b = reduce64(acc_b);
  s.sum_aa = reduce64(acc_aa);
  s.sum_bb = reduce64(acc_bb);
  s.sum_ab = reduce64(acc_ab);
  for (; i < n; ++i) {
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
  const __m256i zero = _mm256_setzero_si256();
  size_t p = 0;
  for (; p + 16 <= n; p += 16) {
    __m256i best_label = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(maps[0] + p));
    __m256i best_count = zero;
    for (int i = 0; i < count; ++i) {
      const __m256i vi = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(maps[i] + p));
      __m256i cnt = zero;
      for (int j = 0; j < count; ++j) {
        const __m256i vj = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(maps[j] + p));
        cnt = _mm256_sub_epi16(cnt, _mm256_cmpeq_epi16(vi, vj));
      }
      const __m256i gt = _mm256_cmpgt_epi16(cnt, best_count);
      best_count = _mm256_blendv_epi8(best_count, cnt, gt);
      best_label = _mm256_blendv_epi8(best_label, vi, gt);
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + p), best_label);
  }
  for (; p < n; ++p) {
    uint16_t best_label = maps[0][p];
    int best_count = 0;
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

}  // namespace vseg::kernels::avx2
