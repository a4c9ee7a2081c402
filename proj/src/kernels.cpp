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

#include "vseg/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "vseg/common.hpp"

namespace vseg::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(VSEG_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend pick_default() {
  if (const char* env = std::getenv("VSEG_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0 && backend_available(Backend::kAvx2)) {
      return Backend::kAvx2;
    }
  }
  return backend_available(Backend::kAvx2) ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{pick_default()};
  return slot;
}

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
      return cpu_has_avx2();
  }
  return false;
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b)) {
    throw InvalidInputError(std::string("kernel backend unavailable: ") + backend_name(b));
  }
  backend_slot().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "?";
}

void correlate_rows_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst) {
#if defined(VSEG_BUILD_AVX2)
  if (active_backend() == Backend::kAvx2) {
    avx2::correlate_rows_f32(src, width, height, taps, radius, dst);
    return;
  }
#endif
  scalar::correlate_rows_f32(src, width, height, taps, radius, dst);
}

void correlate_cols_f32(const float* src, int width, int height, const float* taps,
                        int radius, float* dst) {
#if defined(VSEG_BUILD_AVX2)
  if (active_backend() == Backend::kAvx2) {
    avx2::correlate_cols_f32(src, width, height, taps, radius, dst);
    return;
  }
#endif
  scalar::correlate_cols_f32(src, width, height, taps, radius, dst);
}

LabelPairStats label_pair_stats_u16(const uint16_t* a, const uint16_t* b,
                                    const uint8_t* valid, size_t n) {
#if defined(VSEG_BUILD_AVX2)
  if (active_backend() == Backend::kAvx2) {
    return avx2::label_pair_stats_u16(a, b, valid, n);
  }
#endif
  return scalar::label_pair_stats_u16(a, b, valid, n);
}

void vote_mode_u16(const uint16_t* const* maps, int count, size_t n, uint16_t* out) {
#if defined(VSEG_BUILD_AVX2)
  if (active_backend() == Backend::kAvx2) {
    avx2::vote_mode_u16(maps, count, n, out);
    return;
  }
#endif
  scalar::vote_mode_u16(maps, count, n, out);
}

}  // namespace vseg::kernels
