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
// Data-parallel inner loops shared by the image pipeline. Every kernel has a
// scalar reference implementation and, on x86-64 builds, an AVX2 variant
// selected at runtime. The variants are equivalence-tested against each other:
// integer kernels must match bit-for-bit, and the float kernels preserve the
// scalar accumulation order per output so they match bit-for-bit as well.

#pragma once

#include <cstddef>
#include <cstdint>

namespace vseg::kernels {

enum class Backend { kScalar, kAvx2 };

/// Backend used by the dispatched entry points. Chosen once per process:
/// AVX2 when compiled in and supported by the CPU, overridable with the
/// VSEG_KERNELS environment variable ("scalar" or "avx2").
Backend active_backend();
bool backend_available(Backend b);
/// Force a backend (tests use this to cross-check variants). Throws
/// InvalidInputError if the backend is not available on this machine.
void set_backend(Backend b);
const char* backend_name(Backend b);

/// Exact integer accumulators for the global-statistics similarity measure.
/// All fields are order-independent integer sums, so any backend and any
/// traversal order produce identical values.
struct LabelPairStats {
  uint64_t count = 0;   // valid pixels
  uint64_t sum_a = 0;   // sum of a
  uint64_t sum_b = 0;   // sum of b
  uint64_t sum_aa = 0;  // sum of a*a
  uint64_t sum_bb = 0;  // sum of b*b
  uint64_t sum_ab = 0;  // sum of a*b
};

// Dispatched entry points ----------------------------------------------------

/// Horizontal correlation with edge replication:
///   dst(x, y) = sum_i taps[i] * src(clamp(x + i - radius), y),  i in [0, 2*radius].
/// Box sums are the special case of all-ones taps.
void correlate_rows_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst);

/// Vertical correlation with edge replication:
///   dst(x, y) = sum_i taps[i] * src(x, clamp(y + i - radius)).
void correlate_cols_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst);

/// Accumulates the six integer sums over pixels where valid[i] != 0.
/// valid may be null, meaning all pixels count.
LabelPairStats label_pair_stats_u16(const uint16_t* a, const uint16_t* b,
                                    const uint8_t* valid, size_t n);

/// Per-pixel plurality vote over `count` label maps of length `n`.
/// maps must be ordered by ascending precedence rank; on tied counts the
/// earliest (highest-precedence) map's label wins.
void vote_mode_u16(const uint16_t* const* maps, int count, size_t n, uint16_t* out);

// Per-backend entry points (for equivalence tests) ---------------------------

namespace scalar {
void correlate_rows_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst);
void correlate_cols_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst);
LabelPairStats label_pair_stats_u16(const uint16_t* a, const uint16_t* b,
                                    const uint8_t* valid, size_t n);
void vote_mode_u16(const uint16_t* const* maps, int count, size_t n, uint16_t* out);
}  // namespace scalar

#if defined(VSEG_BUILD_AVX2)
namespace avx2 {
void correlate_rows_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst);
void correlate_cols_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst);
LabelPairStats label_pair_stats_u16(const uint16_t* a, const uint16_t* b,
                                    const uint8_t* valid, size_t n);
void vote_mode_u16(const uint16_t* const* maps, int count, size_t n, uint16_t* out);
}  // namespace avx2
#endif

}  // namespace vseg::kernels
