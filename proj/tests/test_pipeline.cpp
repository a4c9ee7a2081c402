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
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "support/testutil.hpp"
#include "vseg/common.hpp"
#include "vseg/config.hpp"
#include "vseg/image_io.hpp"
#include "vseg/metrics.hpp"
#include "vseg/pipeline.hpp"

using namespace vseg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("end-to-end run: vote, select, correct, write, report") {
  testutil::TempDir tmp("pipe_e2e");
  const auto fx = testutil::build_pipeline_fixture(tmp.path());
  auto cfg = config::load_config_file(fx.config_path);

  const auto result = pipeline::run_pipeline(cfg);

  CHECK(result.videos_ok == 3);
  CHECK(result.videos_failed == 0);
  REQUIRE(result.outcomes.size() == 3);

  for (const auto& outcome : result.outcomes) {
    CHECK(outcome.ok);
    CHECK(outcome.has_ground_truth);
    // The temporally constant candidate must win every video.
    CHECK(outcome.selected_candidate == "coherent");
    REQUIRE(outcome.scores.size() == 2);
    CHECK(outcome.scores[0] == 1.0);       // static scene, constant labels
    CHECK(outcome.scores[1] < 0.9);        // per-frame flicker
    // One correction: the mock answers "lake" for the river-labelled water.
    REQUIRE(outcome.corrections.size() == 1);
    CHECK(outcome.corrections[0].chosen_name == "lake");
    CHECK(outcome.corrections[0].frames_touched ==
          static_cast<int64_t>(fx.stems.size()));
  }

  // Written labels match the analytically expected maps exactly.
  for (const auto& vid : fx.video_ids) {
    for (size_t f = 0; f < fx.stems.size(); ++f) {
      const LabelMap got = io::read_label_png(
          cfg.output_dir + "/" + vid + "/" + fx.stems[f] + ".png", fx.num_classes);
      CHECK(got.data == fx.expected_final.at(vid)[f].data);
    }
  }

  // Report: cross-check against independent metric oracles on the expected
  // outputs (identical for every video, pooled across all three).
  REQUIRE(result.report.has_value());
  std::vector<LabelMap> all_preds, all_gts;
  for (const auto& vid : fx.video_ids) {
    all_preds.insert(all_preds.end(), fx.expected_final.at(vid).begin(),
                     fx.expected_final.at(vid).end());
    all_gts.insert(all_gts.end(), fx.gt.at(vid).begin(), fx.gt.at(vid).end());
  }
  const auto [want_per_class, want_miou] =
      testutil::oracle_miou(all_preds, all_gts, fx.num_classes, {255});
  CHECK(result.report->miou == doctest::Approx(want_miou).epsilon(1e-12));
  CHECK(result.report->miou > 0.5);  // nontrivial but imperfect by design
  CHECK(result.report->miou < 1.0);
  for (int k : {8, 16}) {
    CHECK(result.report->videos_scored.at(k) == 3);
    double mean = 0.0;
    for (const auto& vid : fx.video_ids) {
      const auto vc = testutil::oracle_vc(fx.expected_final.at(vid), fx.gt.at(vid), k,
                                          {255});
      REQUIRE(vc.has_value());
      mean += *vc;
    }
    mean /= 3.0;
    CHECK(result.report->mvc.at(k) == doctest::Approx(mean).epsilon(1e-12));
  }

  // Side artifacts: selections, corrections, report files.
  const auto selections = nlohmann::json::parse(slurp(cfg.output_dir + "/selections.json"));
  REQUIRE(selections.is_array());
  CHECK(selections.size() == 3);
  CHECK(selections[0].at("selected") == "coherent");
  const auto corrections = nlohmann::json::parse(slurp(cfg.output_dir + "/corrections.json"));
  CHECK(corrections.size() == 3);
  const auto report_file =
      metrics::MetricReport::from_json(slurp(cfg.output_dir + "/report.json"));
  CHECK(report_file.miou == result.report->miou);
}

TEST_CASE("single candidate with identity augmentation copies the input bytes") {
  testutil::TempDir tmp("pipe_flat");
  const auto fx = testutil::build_pipeline_fixture(tmp.path());
  auto cfg = config::load_config_file(fx.flat_config_path);

  const auto result = pipeline::run_pipeline(cfg);
  CHECK(result.videos_ok == 3);

  for (const auto& outcome : result.outcomes) {
    CHECK(outcome.selected_candidate == "coherent");
    CHECK(outcome.scores.empty());       // no scoring with one candidate
    CHECK(outcome.corrections.empty());  // vlm off
  }
  // Degenerate pipeline = identity: outputs are bit-identical to the inputs.
  for (const auto& vid : fx.video_ids) {
    for (const auto& stem : fx.stems) {
      const std::string in_path = fx.root + "/pred_flat/" + vid + "/" + stem + ".png";
      const std::string out_path = cfg.output_dir + "/" + vid + "/" + stem + ".png";
      CHECK(slurp(out_path) == slurp(in_path));
    }
  }
}

TEST_CASE("video filter restricts processing") {
  testutil::TempDir tmp("pipe_filter");
  const auto fx = testutil::build_pipeline_fixture(tmp.path());
  auto cfg = config::load_config_file(fx.config_path);
  cfg.output_dir = tmp.path() + "/out_filtered";

  const auto result = pipeline::run_pipeline(cfg, {"video_b"});
  CHECK(result.videos_ok == 1);
  REQUIRE(result.outcomes.size() == 1);
  CHECK(result.outcomes[0].video_id == "video_b");
  CHECK(fs::exists(cfg.output_dir + "/video_b/" + fx.stems[0] + ".png"));
  CHECK_FALSE(fs::exists(cfg.output_dir + "/video_a"));

  // Unknown ids fail that video without failing the run.
  const auto missing = pipeline::run_pipeline(cfg, {"video_a", "no_such_video"});
  CHECK(missing.videos_ok == 1);
  CHECK(missing.videos_failed == 1);
}

TEST_CASE("one broken video does not poison the others") {
  testutil::TempDir tmp("pipe_iso");
  const auto fx = testutil::build_pipeline_fixture(tmp.path());
  auto cfg = config::load_config_file(fx.config_path);
  cfg.output_dir = tmp.path() + "/out_iso";

  // Corrupt video_b's coherent predictions: drop one variant directory.
  fs::remove_all(fx.root + "/pred_coherent/video_b/s110_flip");

  const auto result = pipeline::run_pipeline(cfg);
  CHECK(result.videos_ok == 2);
  CHECK(result.videos_failed == 1);
  REQUIRE(result.outcomes.size() == 3);
  for (const auto& outcome : result.outcomes) {
    if (outcome.video_id == "video_b") {
      CHECK_FALSE(outcome.ok);
      CHECK(outcome.error.find("s110_flip") != std::string::npos);
    } else {
      CHECK(outcome.ok);
      CHECK(outcome.selected_candidate == "coherent");
    }
  }
  // Healthy videos still wrote complete outputs; the broken one wrote none.
  CHECK(fs::exists(cfg.output_dir + "/video_a/" + fx.stems.back() + ".png"));
  CHECK(fs::exists(cfg.output_dir + "/video_c/" + fx.stems.back() + ".png"));
  CHECK_FALSE(fs::exists(cfg.output_dir + "/video_b"));
  // The report covers only the videos that succeeded.
  REQUIRE(result.report.has_value());
  CHECK(result.report->videos_scored.at(8) == 2);
}

TEST_CASE("reruns and worker counts do not change a single output byte") {
  testutil::TempDir tmp("pipe_det");
  const auto fx = testutil::build_pipeline_fixture(tmp.path());

  std::vector<uint64_t> digests;
  for (int run = 0; run < 3; ++run) {
    auto cfg = config::load_config_file(fx.config_path);
    cfg.output_dir = tmp.path() + "/out_run" + std::to_string(run);
    cfg.workers = run == 2 ? 4 : 1;  // run 2 exercises the thread pool
    const auto result = pipeline::run_pipeline(cfg);
    CHECK(result.videos_ok == 3);
    digests.push_back(testutil::hash_tree(cfg.output_dir));
  }
  CHECK(digests[0] == digests[1]);
  CHECK(digests[0] == digests[2]);
}

TEST_CASE("mock answers can be keyed per video id") {
  testutil::TempDir tmp("pipe_keyed");
  const auto fx = testutil::build_pipeline_fixture(tmp.path());
  auto cfg = config::load_config_file(fx.config_path);
  cfg.output_dir = tmp.path() + "/out_keyed";
  // video_b's canned answer picks sea; the default still says lake.
  cfg.vlm.mock_answers = {{"video_b", "That is the open sea."}};

  const auto result = pipeline::run_pipeline(cfg);
  REQUIRE(result.videos_ok == 3);
  for (const auto& outcome : result.outcomes) {
    REQUIRE(outcome.corrections.size() == 1);
    if (outcome.video_id == "video_b") {
      CHECK(outcome.corrections[0].chosen_name == "sea");
    } else {
      CHECK(outcome.corrections[0].chosen_name == "lake");
    }
  }
  const LabelMap b0 = io::read_label_png(
      cfg.output_dir + "/video_b/" + fx.stems[0] + ".png", fx.num_classes);
  // Bottom rows carry the water region: now sea (5) instead of lake (4).
  CHECK(b0.at(0, b0.height - 1) == 5);
}

TEST_CASE("unparseable vlm answers leave the vote untouched") {
  testutil::TempDir tmp("pipe_failopen");
  const auto fx = testutil::build_pipeline_fixture(tmp.path());
  auto cfg = config::load_config_file(fx.config_path);
  cfg.output_dir = tmp.path() + "/out_failopen";
  cfg.vlm.mock_default_answer = "I am not sure what that is.";

  const auto result = pipeline::run_pipeline(cfg);
  CHECK(result.videos_ok == 3);
  for (const auto& outcome : result.outcomes) {
    CHECK(outcome.ok);
    CHECK(outcome.corrections.empty());
  }
  // Outputs equal the uncorrected vote (river stays river).
  for (const auto& vid : fx.video_ids) {
    const LabelMap got = io::read_label_png(
        cfg.output_dir + "/" + vid + "/" + fx.stems[0] + ".png", fx.num_classes);
    CHECK(got.data == fx.coherent_voted.at(vid)[0].data);
  }
}

TEST_CASE("invalid configs are rejected before any work") {
  testutil::TempDir tmp("pipe_badcfg");
  auto cfg = config::default_config();  // empty paths
  CHECK_THROWS_AS(pipeline::run_pipeline(cfg), ConfigError);
}

TEST_CASE("outcome JSON lists selections with scores") {
  pipeline::VideoOutcome a;
  a.video_id = "v1";
  a.ok = true;
  a.scores = {1.0, 0.5};
  a.selected_candidate = "x";
  a.has_ground_truth = true;
  pipeline::VideoOutcome b;
  b.video_id = "v2";
  b.ok = false;
  b.error = "boom";
  const auto j = nlohmann::json::parse(pipeline::outcomes_to_json({a, b}));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0].at("video_id") == "v1");
  CHECK(j[0].at("ok") == true);
  CHECK(j[0].at("selected") == "x");
  CHECK(j[0].at("scores").size() == 2);
  CHECK(j[1].at("ok") == false);
  CHECK(j[1].at("error") == "boom");
}
