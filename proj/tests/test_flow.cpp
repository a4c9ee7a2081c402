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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "support/testutil.hpp"
#include "vseg/common.hpp"
#include "vseg/flow.hpp"

using namespace vseg;

namespace {

// Median endpoint error against a constant true displacement, over the
// interior (borders lack support and are excluded by `margin`).
double median_epe(const FlowField& flow, double tx, double ty, int margin) {
  std::vector<double> errs;
  for (int y = margin; y < flow.height - margin; ++y) {
    for (int x = margin; x < flow.width - margin; ++x) {
      const double ex = flow.dx(x, y) - tx;
      const double ey = flow.dy(x, y) - ty;
      errs.push_back(std::sqrt(ex * ex + ey * ey));
    }
  }
  std::sort(errs.begin(), errs.end());
  return errs[errs.size() / 2];
}

}  // namespace

TEST_CASE("parameters are validated") {
  flow::FarnebackParams p;
  CHECK_NOTHROW(p.validate());
  p.pyr_scale = 1.0;
  CHECK_THROWS_AS(p.validate(), InvalidInputError);
  p = flow::FarnebackParams{};
  p.winsize = 4;  // must be odd
  CHECK_THROWS_AS(p.validate(), InvalidInputError);
  p = flow::FarnebackParams{};
  p.poly_n = 6;  // must be 5 or 7
  CHECK_THROWS_AS(p.validate(), InvalidInputError);
  p = flow::FarnebackParams{};
  p.levels = 0;
  CHECK_THROWS_AS(p.validate(), InvalidInputError);
}

TEST_CASE("pyramid dimensions follow the scale and stop below 8x8") {
  const GrayFrame base = testutil::make_texture(12, 12, 1);
  const auto pyr = flow::gaussian_pyramid(base, 4, 0.5);
  // 12x12 -> 6x6 would need an >=8x8 source at the next step; 6 < 8 stops it.
  REQUIRE(pyr.size() == 2);
  CHECK(pyr[0].width == 12);
  CHECK(pyr[1].width == 6);
  CHECK(pyr[1].height == 6);

  const GrayFrame big = testutil::make_texture(64, 48, 2);
  const auto deep = flow::gaussian_pyramid(big, 3, 0.5);
  REQUIRE(deep.size() == 3);
  CHECK(deep[1].width == 32);
  CHECK(deep[1].height == 24);
  CHECK(deep[2].width == 16);
  CHECK(deep[2].height == 12);
  // Level 0 is the input itself, untouched.
  CHECK(deep[0].data == big.data);
}

TEST_CASE("quadratic fit recovers a linear ramp's gradient") {
  // f(x, y) = 0.01 x + 0.02 y + 0.1: the fitted b must be (0.01, 0.02) and
  // the curvature terms ~0 away from borders.
  const int w = 21, h = 17;
  GrayFrame ramp = GrayFrame::create(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      ramp.at(x, y) = static_cast<float>(0.01 * x + 0.02 * y + 0.1);
    }
  }
  const auto exp = flow::poly_expand(ramp, 5, 1.1);
  REQUIRE(exp.width == w);
  REQUIRE(exp.height == h);
  for (int y = 4; y < h - 4; ++y) {
    for (int x = 4; x < w - 4; ++x) {
      const float* c = exp.at(x, y);
      CHECK(std::abs(c[0]) < 1e-4);          // a11
      CHECK(std::abs(c[1]) < 1e-4);          // a12
      CHECK(std::abs(c[2]) < 1e-4);          // a22
      CHECK(std::abs(c[3] - 0.01) < 1e-4);   // b1
      CHECK(std::abs(c[4] - 0.02) < 1e-4);   // b2
      const float value = static_cast<float>(0.01 * x + 0.02 * y + 0.1);
      CHECK(std::abs(c[5] - value) < 1e-4);  // c tracks the signal
    }
  }
}

TEST_CASE("quadratic fit recovers a pure parabola's curvature") {
  // f(x) = 0.001 * (x - cx)^2 around the center column.
  const int w = 31, h = 15;
  GrayFrame bowl = GrayFrame::create(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - 15.0;
      bowl.at(x, y) = static_cast<float>(0.001 * dx * dx);
    }
  }
  const auto exp = flow::poly_expand(bowl, 7, 1.5);
  const float* c = exp.at(15, 7);
  CHECK(std::abs(c[0] - 0.001) < 1e-4);  // a11 = quadratic coefficient
  CHECK(std::abs(c[1]) < 1e-5);          // no cross term
  CHECK(std::abs(c[2]) < 1e-5);          // flat in y
  CHECK(std::abs(c[3]) < 1e-4);          // b1 = 0 at the vertex
}

TEST_CASE("identical frames give exactly zero flow") {
  const GrayFrame f = testutil::make_texture(64, 48, 5);
  const auto flow_field = flow::farneback_flow(f, f, flow::FarnebackParams{});
  for (float v : flow_field.data) CHECK(v == 0.0f);
}

TEST_CASE("textureless frames give finite near-zero flow") {
  const GrayFrame a = GrayFrame::create(40, 40, 0.25f);
  const GrayFrame b = GrayFrame::create(40, 40, 0.75f);
  const auto flow_field = flow::farneback_flow(a, b, flow::FarnebackParams{});
  for (float v : flow_field.data) {
    CHECK(std::isfinite(v));
    // No gradient anywhere: the regularized solve must not invent motion.
    CHECK(std::abs(v) < 1e-3f);
  }
}

TEST_CASE("integer translations are recovered to subpixel accuracy") {
  const int w = 96, h = 80;
  for (const auto& [sx, sy] : std::vector<std::pair<int, int>>{{1, 0}, {0, 2}, {3, 2}}) {
    const GrayFrame prev = testutil::make_texture(w, h, 42);
    const GrayFrame next = testutil::make_texture(w, h, 42, sx, sy);
    const auto flow_field = flow::farneback_flow(prev, next, flow::FarnebackParams{});
    const double med = median_epe(flow_field, sx, sy, 12);
    INFO("shift (", sx, ",", sy, ") median EPE ", med);
    CHECK(med < 0.5);
    for (float v : flow_field.data) CHECK(std::isfinite(v));
  }
}

TEST_CASE("flow direction follows the displacement sign") {
  // Content moves by (-2, 0): the recovered flow must be negative in x.
  const GrayFrame prev = testutil::make_texture(80, 64, 7);
  const GrayFrame next = testutil::make_texture(80, 64, 7, -2.0, 0.0);
  const auto flow_field = flow::farneback_flow(prev, next, flow::FarnebackParams{});
  CHECK(median_epe(flow_field, -2.0, 0.0, 12) < 0.5);
}

TEST_CASE("mismatched or empty inputs are rejected") {
  const GrayFrame a = testutil::make_texture(32, 32, 1);
  const GrayFrame b = testutil::make_texture(33, 32, 1);
  CHECK_THROWS_AS(flow::farneback_flow(a, b, flow::FarnebackParams{}), InvalidInputError);
  CHECK_THROWS_AS(flow::gaussian_pyramid(GrayFrame{}, 3, 0.5), InvalidInputError);
  CHECK_THROWS_AS(flow::poly_expand(a, 4, 1.1), InvalidInputError);  // even poly_n
}
