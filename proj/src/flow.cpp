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

#include "vseg/flow.hpp"

#include <algorithm>
#include <cmath>

#include "vseg/kernels.hpp"

namespace vseg::flow {

namespace {

std::vector<float> gaussian_taps(double sigma, int radius) {
  std::vector<float> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = 0; i <= 2 * radius; ++i) {
    const double x = i - radius;
    const double v = std::exp(-x * x / (2.0 * sigma * sigma));
    taps[i] = static_cast<float>(v);
    sum += v;
  }
  for (float& t : taps) t = static_cast<float>(t / sum);
  return taps;
}

// Pixel-center bilinear resampling with edge clamping.
void resize_bilinear(const float* src, int sw, int sh, float* dst, int dw, int dh) {
  const double sx_ratio = static_cast<double>(sw) / dw;
  const double sy_ratio = static_cast<double>(sh) / dh;
  for (int y = 0; y < dh; ++y) {
    double fy = (y + 0.5) * sy_ratio - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(sh - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, sh - 1);
    const float wy = static_cast<float>(fy - y0);
    for (int x = 0; x < dw; ++x) {
      double fx = (x + 0.5) * sx_ratio - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(sw - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, sw - 1);
      const float wx = static_cast<float>(fx - x0);
      const float top = src[static_cast<size_t>(y0) * sw + x0] * (1.0f - wx) +
                        src[static_cast<size_t>(y0) * sw + x1] * wx;
      const float bot = src[static_cast<size_t>(y1) * sw + x0] * (1.0f - wx) +
                        src[static_cast<size_t>(y1) * sw + x1] * wx;
      dst[static_cast<size_t>(y) * dw + x] = top * (1.0f - wy) + bot * wy;
    }
  }
}

void separable_correlate(const float* src, int w, int h, const std::vector<float>& row_taps,
                         const std::vector<float>& col_taps, int radius, float* tmp,
                         float* dst) {
  kernels::correlate_rows_f32(src, w, h, row_taps.data(), radius, tmp);
  kernels::correlate_cols_f32(tmp, w, h, col_taps.data(), radius, dst);
}

}  // namespace

void FarnebackParams::validate() const {
  if (!(pyr_scale > 0.0 && pyr_scale < 1.0)) {
    throw InvalidInputError("FarnebackParams: pyr_scale must be in (0,1)");
  }
  if (levels < 1) throw InvalidInputError("FarnebackParams: levels must be >= 1");
  if (winsize < 3 || winsize % 2 == 0) {
    throw InvalidInputError("FarnebackParams: winsize must be odd and >= 3");
  }
  if (iterations < 1) throw InvalidInputError("FarnebackParams: iterations must be >= 1");
  if (poly_n != 5 && poly_n != 7) {
    throw InvalidInputError("FarnebackParams: poly_n must be 5 or 7");
  }
  if (!(poly_sigma > 0.0)) throw InvalidInputError("FarnebackParams: poly_sigma must be > 0");
  if (!(regularization_eps > 0.0)) {
    throw InvalidInputError("FarnebackParams: regularization_eps must be > 0");
  }
}

std::vector<GrayFrame> gaussian_pyramid(const GrayFrame& frame, int levels, double scale) {
  if (frame.width <= 0 || frame.height <= 0 || frame.data.empty()) {
    throw InvalidInputError("gaussian_pyramid: zero-size frame");
  }
  if (levels < 1) throw InvalidInputError("gaussian_pyramid: levels must be >= 1");
  if (!(scale > 0.0 && scale < 1.0)) {
    throw InvalidInputError("gaussian_pyramid: scale must be in (0,1)");
  }

  std::vector<GrayFrame> pyramid;
  pyramid.push_back(frame);

  // Anti-aliasing blur strength for one downscale step.
  const double sigma = std::max(0.15, (1.0 / scale - 1.0) * 0.5);
  const int radius = std::max(1, static_cast<int>(std::lround(3.0 * sigma)));
  const std::vector<float> taps = gaussian_taps(sigma, radius);

  std::vector<float> tmp;
  std::vector<float> smoothed;
  while (static_cast<int>(pyramid.size()) < levels) {
    const GrayFrame& cur = pyramid.back();
    // Levels are only produced from sources of at least 8x8 pixels.
    if (cur.width < 8 || cur.height < 8) break;
    const int nw = static_cast<int>(std::lround(cur.width * scale));
    const int nh = static_cast<int>(std::lround(cur.height * scale));
    if (nw < 1 || nh < 1) break;

    tmp.resize(cur.pixel_count());
    smoothed.resize(cur.pixel_count());
    separable_correlate(cur.data.data(), cur.width, cur.height, taps, taps, radius,
                        tmp.data(), smoothed.data());

    GrayFrame next = GrayFrame::create(nw, nh);
    resize_bilinear(smoothed.data(), cur.width, cur.height, next.data.data(), nw, nh);
    for (float& v : next.data) v = std::clamp(v, 0.0f, 1.0f);
    pyramid.push_back(std::move(next));
  }
  return pyramid;
}

PolyExpansion poly_expand(const GrayFrame& frame, int poly_n, double poly_sigma) {
  if (poly_n < 3 || poly_n % 2 == 0) {
    throw InvalidInputError("poly_expand: poly_n must be odd and >= 3");
  }
  if (!(poly_sigma > 0.0)) throw InvalidInputError("poly_expand: poly_sigma must be > 0");
  if (frame.width <= 0 || frame.height <= 0) {
    throw InvalidInputError("poly_expand: empty frame");
  }

  const int radius = poly_n / 2;
  const int n = 2 * radius + 1;
  const std::vector<float> g = gaussian_taps(poly_sigma, radius);
  std::vector<float> gx(n), gxx(n);
  double m2 = 0.0, m4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = i - radius;
    gx[i] = static_cast<float>(g[i] * x);
    gxx[i] = static_cast<float>(g[i] * x * x);
    m2 += g[i] * x * x;
    m4 += g[i] * x * x * x * x;
  }
  // Moment determinant of the {1, x^2, y^2} block; positive for radius >= 1.
  const double dm = m4 - m2 * m2;

  const int w = frame.width;
  const int h = frame.height;
  const size_t npx = frame.pixel_count();

  // Separable projections onto the six basis functions. Row pass produces the
  // x-moments, column pass the y-moments.
  std::vector<float> s0(npx), s1(npx), s2(npx), tmp(npx);
  kernels::correlate_rows_f32(frame.data.data(), w, h, g.data(), radius, s0.data());
  kernels::correlate_rows_f32(frame.data.data(), w, h, gx.data(), radius, s1.data());
  kernels::correlate_rows_f32(frame.data.data(), w, h, gxx.data(), radius, s2.data());

  std::vector<float> p1(npx), px(npx), py(npx), pxx(npx), pyy(npx), pxy(npx);
  kernels::correlate_cols_f32(s0.data(), w, h, g.data(), radius, p1.data());
  kernels::correlate_cols_f32(s1.data(), w, h, g.data(), radius, px.data());
  kernels::correlate_cols_f32(s0.data(), w, h, gx.data(), radius, py.data());
  kernels::correlate_cols_f32(s2.data(), w, h, g.data(), radius, pxx.data());
  kernels::correlate_cols_f32(s0.data(), w, h, gxx.data(), radius, pyy.data());
  kernels::correlate_cols_f32(s1.data(), w, h, gx.data(), radius, pxy.data());
  tmp.clear();

  PolyExpansion exp;
  exp.width = w;
  exp.height = h;
  exp.coeffs.resize(PolyExpansion::kStride * npx);

  const double inv_m2 = 1.0 / m2;
  const double inv_m2sq = 1.0 / (m2 * m2);
  const double inv_dm = 1.0 / dm;
  for (size_t i = 0; i < npx; ++i) {
    const double b1 = px[i] * inv_m2;
    const double b2 = py[i] * inv_m2;
    const double axy = pxy[i] * inv_m2sq;
    // {c, axx, ayy} decouple into sum/difference equations of the moment
    // system; dm is its Schur complement.
    const double sum = (pxx[i] + pyy[i] - 2.0 * m2 * p1[i]) * inv_dm;
    const double diff = (pxx[i] - pyy[i]) * inv_dm;
    const double axx = 0.5 * (sum + diff);
    const double ayy = 0.5 * (sum - diff);
    const double c = p1[i] - m2 * sum;

    float* out = exp.coeffs.data() + PolyExpansion::kStride * i;
    out[0] = static_cast<float>(axx);        // a11
    out[1] = static_cast<float>(0.5 * axy);  // a12 (A symmetric)
    out[2] = static_cast<float>(ayy);        // a22
    out[3] = static_cast<float>(b1);
    out[4] = static_cast<float>(b2);
    out[5] = static_cast<float>(c);
  }
  return exp;
}

namespace {

// One displacement refinement round at a fixed pyramid level. Samples the
// next frame's expansion along the current flow, forms the averaged-model
// constraints, aggregates them over the winsize window with uniform weights
// and solves the regularized 2x2 system per pixel.
void displacement_update(const PolyExpansion& prev_exp, const PolyExpansion& next_exp,
                         FlowField& flow, int winsize, double eps) {
  const int w = prev_exp.width;
  const int h = prev_exp.height;
  const size_t npx = static_cast<size_t>(w) * h;
  const int radius = winsize / 2;

  std::vector<float> g11(npx), g12(npx), g22(npx), h1(npx), h2(npx);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t idx = static_cast<size_t>(y) * w + x;
      const float fx = flow.data[2 * idx];
      const float fy = flow.data[2 * idx + 1];

      // Bilinear sample of the next frame's coefficients at p + d, clamped.
      double qx = std::clamp(static_cast<double>(x) + fx, 0.0, static_cast<double>(w - 1));
      double qy = std::clamp(static_cast<double>(y) + fy, 0.0, static_cast<double>(h - 1));
      const int x0 = static_cast<int>(qx);
      const int y0 = static_cast<int>(qy);
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const float ax = static_cast<float>(qx - x0);
      const float ay = static_cast<float>(qy - y0);
      const float w00 = (1.0f - ax) * (1.0f - ay);
      const float w10 = ax * (1.0f - ay);
      const float w01 = (1.0f - ax) * ay;
      const float w11 = ax * ay;

      const float* c00 = next_exp.at(x0, y0);
      const float* c10 = next_exp.at(x1, y0);
      const float* c01 = next_exp.at(x0, y1);
      const float* c11 = next_exp.at(x1, y1);
      float warped[5];
      for (int k = 0; k < 5; ++k) {
        warped[k] = w00 * c00[k] + w10 * c10[k] + w01 * c01[k] + w11 * c11[k];
      }

      const float* cp = prev_exp.at(x, y);
      const float a11 = 0.5f * (cp[0] + warped[0]);
      const float a12 = 0.5f * (cp[1] + warped[1]);
      const float a22 = 0.5f * (cp[2] + warped[2]);
      const float db1 = -0.5f * (warped[3] - cp[3]) + (a11 * fx + a12 * fy);
      const float db2 = -0.5f * (warped[4] - cp[4]) + (a12 * fx + a22 * fy);

      g11[idx] = a11 * a11 + a12 * a12;
      g12[idx] = a12 * (a11 + a22);
      g22[idx] = a12 * a12 + a22 * a22;
      h1[idx] = a11 * db1 + a12 * db2;
      h2[idx] = a12 * db1 + a22 * db2;
    }
  }

  // Uniform window weights: box sums realized as all-ones correlations.
  const std::vector<float> ones(winsize, 1.0f);
  std::vector<float> tmp(npx), blurred(npx);
  for (std::vector<float>* plane : {&g11, &g12, &g22, &h1, &h2}) {
    kernels::correlate_rows_f32(plane->data(), w, h, ones.data(), radius, tmp.data());
    kernels::correlate_cols_f32(tmp.data(), w, h, ones.data(), radius, blurred.data());
    plane->swap(blurred);
  }

  for (size_t i = 0; i < npx; ++i) {
    const double m11 = static_cast<double>(g11[i]) + eps;
    const double m12 = g12[i];
    const double m22 = static_cast<double>(g22[i]) + eps;
    const double det = m11 * m22 - m12 * m12;  // > 0: PSD sum plus eps*I
    flow.data[2 * i] = static_cast<float>((m22 * h1[i] - m12 * h2[i]) / det);
    flow.data[2 * i + 1] = static_cast<float>((m11 * h2[i] - m12 * h1[i]) / det);
  }
}

FlowField upsample_flow(const FlowField& src, int nw, int nh) {
  FlowField dst = FlowField::create(nw, nh);
  const size_t sn = src.pixel_count();
  const size_t dn = dst.pixel_count();
  std::vector<float> plane_src(sn), plane_dst(dn);
  const float sx = static_cast<float>(nw) / src.width;
  const float sy = static_cast<float>(nh) / src.height;
  for (int ch = 0; ch < 2; ++ch) {
    for (size_t i = 0; i < sn; ++i) plane_src[i] = src.data[2 * i + ch];
    resize_bilinear(plane_src.data(), src.width, src.height, plane_dst.data(), nw, nh);
    const float scale = (ch == 0) ? sx : sy;
    for (size_t i = 0; i < dn; ++i) dst.data[2 * i + ch] = plane_dst[i] * scale;
  }
  return dst;
}

}  // namespace

FlowField farneback_flow(const GrayFrame& prev, const GrayFrame& next,
                         const FarnebackParams& params) {
  params.validate();
  if (!same_dims(prev.width, prev.height, next.width, next.height)) {
    throw InvalidInputError("farneback_flow: frame dimensions differ");
  }

  const std::vector<GrayFrame> pyr_prev = gaussian_pyramid(prev, params.levels, params.pyr_scale);
  const std::vector<GrayFrame> pyr_next = gaussian_pyramid(next, params.levels, params.pyr_scale);
  const int top = static_cast<int>(pyr_prev.size()) - 1;

  FlowField flow = FlowField::create(pyr_prev[top].width, pyr_prev[top].height);
  for (int lvl = top; lvl >= 0; --lvl) {
    const GrayFrame& fp = pyr_prev[lvl];
    const GrayFrame& fn = pyr_next[lvl];
    if (lvl != top) flow = upsample_flow(flow, fp.width, fp.height);

    const PolyExpansion ep = poly_expand(fp, params.poly_n, params.poly_sigma);
    const PolyExpansion en = poly_expand(fn, params.poly_n, params.poly_sigma);
    for (int it = 0; it < params.iterations; ++it) {
      displacement_update(ep, en, flow, params.winsize, params.regularization_eps);
    }
  }
  return flow;
}

}  // namespace vseg::flow
