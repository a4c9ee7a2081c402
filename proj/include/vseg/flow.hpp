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
// Dense two-frame optical flow estimation: per-pixel quadratic polynomial
// expansion plus coarse-to-fine displacement solves over an image pyramid,
// and nearest-neighbor label warping along a flow field.

#pragma once

#include <vector>

#include "vseg/image.hpp"

namespace vseg::flow {

struct FarnebackParams {
  double pyr_scale = 0.5;           // pyramid downscale ratio, in (0,1)
  int levels = 3;                   // >= 1
  int winsize = 15;                 // aggregation window, odd >= 3
  int iterations = 3;               // displacement refinement rounds per level
  int poly_n = 5;                   // expansion neighborhood, odd, 5 or 7
  double poly_sigma = 1.1;          // Gaussian applicability std, > 0
  double regularization_eps = 1e-6; // added to the solve diagonal, > 0

  void validate() const;  // throws InvalidInputError on violation
};

/// Per-pixel quadratic model f(p + u) ~ u'Au + b'u + c fitted over a
/// poly_n x poly_n neighborhood. Coefficients interleaved per pixel as
/// [a11, a12, a22, b1, b2, c], with A symmetric (a12 stored once).
struct PolyExpansion {
  static constexpr int kStride = 6;
  int width = 0;
  int height = 0;
  std::vector<float> coeffs;  // kStride * width * height

  const float* at(int x, int y) const {
    return coeffs.data() + kStride * (static_cast<size_t>(y) * width + x);
  }
  float* at(int x, int y) {
    return coeffs.data() + kStride * (static_cast<size_t>(y) * width + x);
  }
};

/// Coarse-to-fine pyramid. result[0] is the input; each next level is
/// Gaussian-smoothed and resampled to round(previous * scale). Levels are
/// only generated from sources of at least 8x8 pixels, so the pyramid may be
/// shorter than `levels`.
std::vector<GrayFrame> gaussian_pyramid(const GrayFrame& frame, int levels, double scale);

/// Weighted least-squares quadratic fit per pixel, computed with separable
/// correlations of the six basis functions {1, x, y, x^2, y^2, xy} under
/// Gaussian applicability weights. Borders use edge replication.
PolyExpansion poly_expand(const GrayFrame& frame, int poly_n, double poly_sigma);

/// Dense displacement field such that prev(p) corresponds to next(p + F(p)).
/// Never contains NaN/Inf; textureless inputs yield exactly zero flow.
FlowField farneback_flow(const GrayFrame& prev, const GrayFrame& next,
                         const FarnebackParams& params);

struct WarpResult {
  LabelMap labels;
  ValidityMask validity;
};

/// Backward warp with nearest-neighbor sampling:
///   out(p) = labels(round(p + flow(p))),  round(v) = floor(v + 0.5).
/// Source coordinates outside the image are marked invalid and receive
/// ignore_label. Label values are never interpolated.
WarpResult warp_labels(const LabelMap& labels, const FlowField& flow_next_to_prev,
                       uint16_t ignore_label = 255);

}  // namespace vseg::flow
