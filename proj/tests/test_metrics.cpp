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
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/testutil.hpp"
#include "vseg/common.hpp"
#include "vseg/metrics.hpp"

using namespace vseg;

namespace {

LabelMap from_values(int w, int h, int nc, std::vector<uint16_t> values) {
  LabelMap m = LabelMap::create(w, h, nc);
  m.data = std::move(values);
  return m;
}

}  // namespace

TEST_CASE("defaults: ignore label 255, window sizes 8 and 16") {
  CHECK(metrics::default_ignore_labels() == std::set<uint16_t>{255});
  CHECK(metrics::default_vc_window_sizes() == std::set<int>{8, 16});
}

TEST_CASE("textbook four-pixel example: mIoU = 7/12") {
  const LabelMap pred = from_values(4, 1, 2, {0, 0, 1, 1});
  const LabelMap gt = from_values(4, 1, 2, {0, 1, 1, 1});
  auto cm = metrics::ConfusionMatrix::create(2);
  metrics::confusion_update(cm, pred, gt, metrics::default_ignore_labels());
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(1, 0) == 1);
  CHECK(cm.at(1, 1) == 2);
  CHECK(cm.at(0, 1) == 0);
  const auto [per_class, mean] = metrics::miou(cm);
  CHECK(per_class.at(0) == doctest::Approx(0.5));         // 1 / (1 + 0 + 1)
  CHECK(per_class.at(1) == doctest::Approx(2.0 / 3.0));   // 2 / (2 + 1 + 0)
  CHECK(mean == doctest::Approx(7.0 / 12.0));
}

TEST_CASE("ignored ground truth drops out of the tally") {
  const LabelMap pred = from_values(3, 1, 2, {0, 1, 1});
  const LabelMap gt = from_values(3, 1, 2, {0, 255, 1});
  auto cm = metrics::ConfusionMatrix::create(2);
  metrics::confusion_update(cm, pred, gt, {255});
  CHECK(cm.total() == 2);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(1, 1) == 1);
}

TEST_CASE("ignore-valued predictions are misses but never false positives") {
  // gt class 0 everywhere; prediction says 255 on half the pixels.
  const LabelMap pred = from_values(4, 1, 2, {0, 255, 255, 0});
  const LabelMap gt = from_values(4, 1, 2, {0, 0, 0, 1});
  auto cm = metrics::ConfusionMatrix::create(2);
  metrics::confusion_update(cm, pred, gt, {255});
  CHECK(cm.at(0, cm.ignored_pred_column()) == 2);
  const auto [per_class, mean] = metrics::miou(cm);
  // Class 0: TP=1, FN=2 (ignored preds), FP=1 (the wrong pixel 3) -> 1/4.
  CHECK(per_class.at(0) == doctest::Approx(0.25));
  // Class 1: TP=0, FN=1, FP=0 -> 0.
  CHECK(per_class.at(1) == doctest::Approx(0.0));
  CHECK(mean == doctest::Approx(0.125));
}

TEST_CASE("out-of-range labels raise errors naming the value") {
  const LabelMap bad_pred = from_values(1, 1, 2, {7});
  const LabelMap gt = from_values(1, 1, 2, {0});
  auto cm = metrics::ConfusionMatrix::create(2);
  CHECK_THROWS_WITH_AS(metrics::confusion_update(cm, bad_pred, gt, {255}),
                       doctest::Contains("7"), InvalidInputError);
  const LabelMap pred = from_values(1, 1, 2, {0});
  const LabelMap bad_gt = from_values(1, 1, 2, {9});
  CHECK_THROWS_WITH_AS(metrics::confusion_update(cm, pred, bad_gt, {255}),
                       doctest::Contains("9"), InvalidInputError);
}

TEST_CASE("zero-union classes are excluded from the mean") {
  // 3 classes, but class 2 never appears anywhere.
  const LabelMap pred = from_values(2, 1, 3, {0, 1});
  const LabelMap gt = from_values(2, 1, 3, {0, 1});
  auto cm = metrics::ConfusionMatrix::create(3);
  metrics::confusion_update(cm, pred, gt, {255});
  const auto [per_class, mean] = metrics::miou(cm);
  CHECK(per_class.size() == 2);
  CHECK(per_class.count(2) == 0);
  CHECK(mean == doctest::Approx(1.0));
}

TEST_CASE("an empty matrix cannot be scored") {
  auto cm = metrics::ConfusionMatrix::create(3);
  CHECK_THROWS_AS(metrics::miou(cm), EmptyInputError);
}

TEST_CASE("matrix merge adds element-wise") {
  const LabelMap pred = from_values(4, 1, 2, {0, 0, 1, 1});
  const LabelMap gt = from_values(4, 1, 2, {0, 1, 1, 1});
  auto a = metrics::ConfusionMatrix::create(2);
  metrics::confusion_update(a, pred, gt, {255});
  auto b = a;
  b.merge(a);
  CHECK(b.total() == 2 * a.total());
  CHECK(b.at(1, 1) == 4);
}

TEST_CASE("mIoU agrees with a per-pixel oracle on random data") {
  for (int trial = 0; trial < 8; ++trial) {
    const int nc = 3 + trial % 4;
    std::vector<LabelMap> preds, gts;
    for (int f = 0; f < 3; ++f) {
      preds.push_back(testutil::make_random_labels(21, 13, nc, 900 + trial * 10 + f));
      LabelMap gt = testutil::make_random_labels(21, 13, nc, 700 + trial * 10 + f);
      for (auto& v : gt.data) {
        if (testutil::urand(3, trial, f, v) < 0.05) v = 255;
      }
      gts.push_back(gt);
    }
    auto cm = metrics::ConfusionMatrix::create(nc);
    for (int f = 0; f < 3; ++f) metrics::confusion_update(cm, preds[f], gts[f], {255});
    const auto [got_per_class, got_mean] = metrics::miou(cm);
    const auto [want_per_class, want_mean] =
        testutil::oracle_miou(preds, gts, nc, {255});
    REQUIRE(got_per_class.size() == want_per_class.size());
    for (const auto& [c, iou] : want_per_class) {
      CHECK(got_per_class.at(c) == iou);  // both are exact integer ratios
    }
    CHECK(got_mean == doctest::Approx(want_mean).epsilon(1e-12));
  }
}

TEST_CASE("video consistency: perfect prediction scores 1") {
  std::vector<LabelMap> gts;
  for (int f = 0; f < 5; ++f) gts.push_back(testutil::make_random_labels(9, 9, 4, 44));
  const auto vc = metrics::video_consistency(gts, gts, 3, {255});
  REQUIRE(vc.has_value());
  CHECK(*vc == 1.0);
}

TEST_CASE("video consistency counts only gt-stable pixels") {
  // Two pixels; pixel 0 gt-stable at class 1, pixel 1 unstable.
  std::vector<LabelMap> gts = {
      from_values(2, 1, 3, {1, 0}),
      from_values(2, 1, 3, {1, 2}),
  };
  // Prediction tracks pixel 0 in frame 0 but breaks it in frame 1.
  std::vector<LabelMap> preds = {
      from_values(2, 1, 3, {1, 0}),
      from_values(2, 1, 3, {2, 2}),
  };
  const auto vc = metrics::video_consistency(preds, gts, 2, {255});
  REQUIRE(vc.has_value());
  CHECK(*vc == 0.0);  // the only stable pixel is mispredicted in frame 1

  // Pixel 1 is gt-unstable, so its predictions never enter the score.
  std::vector<LabelMap> good = {
      from_values(2, 1, 3, {1, 9}),
      from_values(2, 1, 3, {1, 9}),
  };
  const auto vc2 = metrics::video_consistency(good, gts, 2, {255});
  REQUIRE(vc2.has_value());
  CHECK(*vc2 == 1.0);
}

TEST_CASE("windows slide with stride 1 and skip empty-G windows") {
  // 4 frames, k=2 -> 3 windows. Make the middle window all-ignored.
  std::vector<LabelMap> gts = {
      from_values(1, 1, 2, {1}),
      from_values(1, 1, 2, {255}),
      from_values(1, 1, 2, {255}),
      from_values(1, 1, 2, {1}),
  };
  std::vector<LabelMap> preds(4, from_values(1, 1, 2, {1}));
  // Windows: [0,1] G empty (unstable 1->255), [1,2] G empty, [2,3] G empty.
  CHECK_FALSE(metrics::video_consistency(preds, gts, 2, {255}).has_value());

  std::vector<LabelMap> gts2 = {
      from_values(1, 1, 2, {1}),
      from_values(1, 1, 2, {1}),
      from_values(1, 1, 2, {255}),
      from_values(1, 1, 2, {255}),
  };
  std::vector<LabelMap> preds2 = {
      from_values(1, 1, 2, {1}),
      from_values(1, 1, 2, {0}),
      from_values(1, 1, 2, {0}),
      from_values(1, 1, 2, {0}),
  };
  // Only window [0,1] has G; pred breaks it -> 0.0 over one window.
  const auto vc = metrics::video_consistency(preds2, gts2, 2, {255});
  REQUIRE(vc.has_value());
  CHECK(*vc == 0.0);
}

TEST_CASE("video consistency agrees with a window-enumerating oracle") {
  for (int trial = 0; trial < 6; ++trial) {
    const int t = 6 + trial;
    const int k = 2 + trial % 4;
    std::vector<LabelMap> preds, gts;
    LabelMap gt_base = testutil::make_random_labels(15, 11, 5, 600 + trial);
    for (int f = 0; f < t; ++f) {
      // Mostly stable gt with occasional changes and ignores.
      LabelMap gt = gt_base;
      for (int i = 0; i < static_cast<int>(gt.data.size()); ++i) {
        const double r = testutil::urand(5, trial, f, i);
        if (r < 0.02) gt.data[i] = 255;
        else if (r < 0.05) gt.data[i] = static_cast<uint16_t>((gt.data[i] + 1) % 5);
      }
      gts.push_back(gt);
      preds.push_back(testutil::corrupt_labels(gt_base, 0.15, 800 + trial * 50 + f));
    }
    const auto got = metrics::video_consistency(preds, gts, k, {255});
    const auto want = testutil::oracle_vc(preds, gts, k, {255});
    REQUIRE(got.has_value() == want.has_value());
    if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-12));
  }
}

TEST_CASE("video consistency validates its inputs") {
  std::vector<LabelMap> two(2, from_values(2, 2, 3, {0, 1, 2, 0}));
  CHECK_THROWS_AS(metrics::video_consistency(two, two, 0, {255}), InvalidInputError);
  CHECK_THROWS_AS(metrics::video_consistency(two, two, 3, {255}), InvalidInputError);
  std::vector<LabelMap> one(1, from_values(2, 2, 3, {0, 1, 2, 0}));
  CHECK_THROWS_AS(metrics::video_consistency(two, one, 2, {255}), InvalidInputError);
}

TEST_CASE("dataset evaluation pools the confusion matrix and averages VC per video") {
  // Video A: 9 frames (enters k=8), video B: 3 frames (too short for k=8).
  metrics::VideoEval a, b;
  const LabelMap base_a = testutil::make_random_labels(10, 8, 3, 71);
  for (int f = 0; f < 9; ++f) {
    a.gts.push_back(base_a);
    a.preds.push_back(f == 0 ? testutil::corrupt_labels(base_a, 0.2, 900) : base_a);
  }
  const LabelMap base_b = testutil::make_random_labels(10, 8, 3, 72);
  for (int f = 0; f < 3; ++f) {
    b.gts.push_back(base_b);
    b.preds.push_back(base_b);
  }
  const auto report = metrics::evaluate_dataset({a, b}, 3, {2, 8}, {255});

  // k=2: both videos contribute; k=8: only video A.
  CHECK(report.videos_scored.at(2) == 2);
  CHECK(report.videos_scored.at(8) == 1);
  const auto vc_a2 = testutil::oracle_vc(a.preds, a.gts, 2, {255});
  const auto vc_a8 = testutil::oracle_vc(a.preds, a.gts, 8, {255});
  REQUIRE(vc_a2.has_value());
  REQUIRE(vc_a8.has_value());
  CHECK(report.mvc.at(2) == doctest::Approx((*vc_a2 + 1.0) / 2.0).epsilon(1e-12));
  CHECK(report.mvc.at(8) == doctest::Approx(*vc_a8).epsilon(1e-12));

  // Pooled mIoU equals the oracle over all frames of both videos.
  std::vector<LabelMap> all_preds = a.preds, all_gts = a.gts;
  all_preds.insert(all_preds.end(), b.preds.begin(), b.preds.end());
  all_gts.insert(all_gts.end(), b.gts.begin(), b.gts.end());
  const auto [want_per_class, want_mean] =
      testutil::oracle_miou(all_preds, all_gts, 3, {255});
  CHECK(report.miou == doctest::Approx(want_mean).epsilon(1e-12));
  REQUIRE(report.per_class_iou.size() == want_per_class.size());
}

TEST_CASE("report JSON round-trips") {
  metrics::MetricReport r;
  r.per_class_iou = {{0, 0.5}, {2, 0.25}};
  r.miou = 0.375;
  r.mvc = {{8, 0.9}, {16, 0.8}};
  r.videos_scored = {{8, 3}, {16, 2}};
  const std::string text = r.to_json();
  const auto back = metrics::MetricReport::from_json(text);
  CHECK(back.per_class_iou == r.per_class_iou);
  CHECK(back.miou == r.miou);
  CHECK(back.mvc == r.mvc);
  CHECK(back.videos_scored == r.videos_scored);
  // Keys serialize as strings (JSON object keys).
  CHECK(text.find("\"8\"") != std::string::npos);
  CHECK(text.find("\"miou\"") != std::string::npos);
}
