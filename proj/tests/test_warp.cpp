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
#include <vector>

#include "doctest.h"
#include "support/testutil.hpp"
#include "vseg/common.hpp"
#include "vseg/flow.hpp"

using namespace vseg;

TEST_CASE("zero flow is the identity warp") {
  const LabelMap labels = testutil::make_random_labels(12, 9, 5, 1);
  const FlowField zero = FlowField::create(12, 9);
  const auto result = flow::warp_labels(labels, zero);
  CHECK(result.labels.data == labels.data);
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 12; ++x) CHECK(result.validity.at(x, y));
  }
}

TEST_CASE("constant integer flow shifts labels and invalidates the border") {
  LabelMap labels = LabelMap::create(4, 1, 50);
  labels.data = {10, 20, 30, 40};
  FlowField f = FlowField::create(4, 1);
  for (int x = 0; x < 4; ++x) f.set(x, 0, 1.0f, 0.0f);
  const auto result = flow::warp_labels(labels, f);
  CHECK(result.labels.data == std::vector<uint16_t>{20, 30, 40, 255});
  CHECK(result.validity.at(0, 0));
  CHECK(result.validity.at(2, 0));
  CHECK_FALSE(result.validity.at(3, 0));
}

TEST_CASE("source coordinates round half up") {
  LabelMap labels = LabelMap::create(4, 1, 50);
  labels.data = {10, 20, 30, 40};

  FlowField f = FlowField::create(4, 1);
  for (int x = 0; x < 4; ++x) f.set(x, 0, 0.49f, 0.0f);
  CHECK(flow::warp_labels(labels, f).labels.data == labels.data);

  for (int x = 0; x < 4; ++x) f.set(x, 0, 0.5f, 0.0f);
  const auto result = flow::warp_labels(labels, f);
  CHECK(result.labels.data == std::vector<uint16_t>{20, 30, 40, 255});

  for (int x = 0; x < 4; ++x) f.set(x, 0, -0.5f, 0.0f);
  // round(-0.5) = floor(0.0) = 0: stays in place.
  CHECK(flow::warp_labels(labels, f).labels.data == labels.data);
}

TEST_CASE("a custom ignore label fills invalid pixels") {
  LabelMap labels = LabelMap::create(2, 1, 5);
  labels.data = {1, 2};
  FlowField f = FlowField::create(2, 1);
  f.set(0, 0, -1.0f, 0.0f);
  f.set(1, 0, 5.0f, 0.0f);
  const auto result = flow::warp_labels(labels, f, 9);
  CHECK(result.labels.data == std::vector<uint16_t>{9, 9});
  CHECK_FALSE(result.validity.at(0, 0));
  CHECK_FALSE(result.validity.at(1, 0));
}

TEST_CASE("vertical displacement uses the dy channel") {
  LabelMap labels = LabelMap::create(1, 3, 9);
  labels.data = {3, 5, 7};
  FlowField f = FlowField::create(1, 3);
  for (int y = 0; y < 3; ++y) f.set(0, y, 0.0f, 2.0f);
  const auto result = flow::warp_labels(labels, f);
  CHECK(result.labels.data == std::vector<uint16_t>{7, 255, 255});
}

TEST_CASE("dimension mismatches are rejected") {
  const LabelMap labels = testutil::make_random_labels(8, 8, 4, 2);
  const FlowField f = FlowField::create(9, 8);
  CHECK_THROWS_AS(flow::warp_labels(labels, f), InvalidInputError);
}

TEST_CASE("estimated flow propagates labels across a translating scene") {
  const int w = 96, h = 80, shift = 3;
  const GrayFrame prev = testutil::make_texture(w, h, 88);
  const GrayFrame next = testutil::make_texture(w, h, 88, shift, 0.0);

  // Labels ride on the content: stripes in texture coordinates.
  LabelMap prev_labels = LabelMap::create(w, h, 4);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) prev_labels.at(x, y) = static_cast<uint16_t>((x / 8) % 4);
  }

  // Propagation t -> t+1: estimate the reverse flow (next to prev) and
  // backward-warp the frame-t labels onto frame t+1.
  const auto reverse = flow::farneback_flow(next, prev, flow::FarnebackParams{});
  const auto result = flow::warp_labels(prev_labels, reverse);

  int checked = 0, correct = 0, valid = 0;
  for (int y = 12; y < h - 12; ++y) {
    for (int x = 12; x < w - 12; ++x) {
      ++checked;
      if (!result.validity.at(x, y)) continue;
      ++valid;
      const uint16_t expected = static_cast<uint16_t>(((x - shift) / 8) % 4);
      if (result.labels.at(x, y) == expected) ++correct;
    }
  }
  CHECK(valid > checked * 95 / 100);
  CHECK(correct > valid * 97 / 100);
}
