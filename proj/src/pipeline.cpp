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

#include "vseg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "nlohmann/json.hpp"
#include "vseg/consistency.hpp"
#include "vseg/dataset.hpp"
#include "vseg/tta.hpp"

namespace fs = std::filesystem;

namespace vseg::pipeline {

namespace {

struct VideoWork {
  VideoOutcome outcome;
  // Only meaningful when outcome.ok and ground truth was present.
  std::vector<LabelMap> final_labels;
  std::vector<LabelMap> gt_labels;
};

std::vector<std::string> candidate_ids(const config::PipelineConfig& config) {
  if (!config.candidate_names.empty()) return config.candidate_names;
  static const char* kDefaults[] = {"model_a", "model_b"};
  std::vector<std::string> ids;
  for (size_t i = 0; i < config.prediction_roots.size(); ++i) ids.push_back(kDefaults[i]);
  return ids;
}

/// Everything for one video, from loading to writing its output tree.
VideoWork process_video(const config::PipelineConfig& config, const std::string& video_id,
                        const std::vector<std::string>& candidates,
                        vlm::VlmClient* vlm_client) {
  VideoWork work;
  work.outcome.video_id = video_id;

  const int num_classes = config.taxonomy.num_classes();
  const dataset::VideoData video = dataset::load_video_dir(
      config.dataset_root, video_id, num_classes, config.taxonomy.ignore_labels);

  // Vote each candidate's ensemble down to one label map per frame.
  std::vector<std::vector<LabelMap>> voted(candidates.size());
  for (size_t c = 0; c < candidates.size(); ++c) {
    const dataset::EnsembleData ensemble = dataset::load_prediction_ensemble(
        config.prediction_roots[c], video_id, config.augs, num_classes,
        config.taxonomy.ignore_labels);
    if (ensemble.stems != video.stems) {
      throw InvalidInputError("prediction stems under " + config.prediction_roots[c] +
                              "/" + video_id + " do not match the video's frame stems");
    }
    for (size_t t = 0; t < ensemble.per_frame.size(); ++t) {
      std::vector<std::pair<LabelMap, tta::AugSpec>> views;
      views.reserve(ensemble.per_frame[t].size());
      for (const tta::EnsemblePrediction& pred : ensemble.per_frame[t]) {
        views.emplace_back(tta::normalize_prediction(pred, video.frames[t].width,
                                                     video.frames[t].height),
                           pred.aug);
      }
      voted[c].push_back(tta::majority_vote(views));
    }
  }

  // Two candidates: keep the temporally more consistent one per video.
  size_t winner = 0;
  if (candidates.size() == 2) {
    std::vector<GrayFrame> gray;
    gray.reserve(video.frames.size());
    for (const RgbFrame& frame : video.frames) gray.push_back(to_gray(frame));
    const consistency::VideoScore score_a = consistency::temporal_consistency_score(
        video_id, candidates[0], gray, voted[0], config.farneback, config.ssim,
        num_classes);
    const consistency::VideoScore score_b = consistency::temporal_consistency_score(
        video_id, candidates[1], gray, voted[1], config.farneback, config.ssim,
        num_classes);
    work.outcome.scores = {score_a.score, score_b.score};
    const auto selection = consistency::select_per_video({score_a}, {score_b});
    winner = selection.at(video_id) == candidates[1] ? 1 : 0;
  }
  work.outcome.selected_candidate = candidates[winner];
  std::vector<LabelMap> final_labels = std::move(voted[winner]);

  if (vlm_client != nullptr) {
    auto [corrected, corrections] = vlm::apply_vlm_corrections(
        video_id, video.frames, final_labels, config.taxonomy.confusable_groups,
        config.vlm.min_pixel_fraction, *vlm_client);
    final_labels = std::move(corrected);
    work.outcome.corrections = std::move(corrections);
  }

  dataset::write_label_tree(config.output_dir, video_id, video.stems, final_labels);

  if (video.masks) {
    work.outcome.has_ground_truth = true;
    work.final_labels = std::move(final_labels);
    work.gt_labels = *video.masks;
  }
  work.outcome.ok = true;
  return work;
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace

std::string outcomes_to_json(const std::vector<VideoOutcome>& outcomes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const VideoOutcome& outcome : outcomes) {
    nlohmann::json j;
    j["video_id"] = outcome.video_id;
    j["ok"] = outcome.ok;
    if (!outcome.ok) j["error"] = outcome.error;
    if (!outcome.scores.empty()) j["scores"] = outcome.scores;
    if (!outcome.selected_candidate.empty()) j["selected"] = outcome.selected_candidate;
    j["corrections"] = outcome.corrections.size();
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

PipelineResult run_pipeline(const config::PipelineConfig& config,
                            const std::vector<std::string>& video_filter) {
  config.validate();

  std::vector<std::string> videos = dataset::list_videos(config.dataset_root);
  if (!video_filter.empty()) {
    std::vector<std::string> requested = video_filter;
    std::sort(requested.begin(), requested.end());
    requested.erase(std::unique(requested.begin(), requested.end()), requested.end());
    videos = std::move(requested);  // missing ids fail per video below
  }
  if (videos.empty()) throw EmptyInputError("no videos to process");

  const std::vector<std::string> candidates = candidate_ids(config);

  std::unique_ptr<vlm::MockVlmClient> mock_client;
  std::unique_ptr<vlm::HttpVlmClient> http_client;
  vlm::VlmClient* vlm_client = nullptr;
  if (config.vlm.mode == "mock") {
    mock_client = std::make_unique<vlm::MockVlmClient>();
    for (const auto& [video_id, answer] : config.vlm.mock_answers) {
      mock_client->set_answer(video_id, answer);
    }
    if (!config.vlm.mock_default_answer.empty()) {
      mock_client->set_default_answer(config.vlm.mock_default_answer);
    }
    vlm_client = mock_client.get();
  } else if (config.vlm.mode == "http") {
    http_client = std::make_unique<vlm::HttpVlmClient>(
        config.vlm.endpoint, config.vlm.token_env, config.vlm.timeout_seconds);
    vlm_client = http_client.get();
  }

  // One slot per video; workers claim indices from an atomic counter, so the
  // assembled results are identical for any worker count.
  std::vector<VideoWork> slots(videos.size());
  std::atomic<size_t> next{0};
  const int worker_count =
      std::max(1, std::min<int>(config.workers, static_cast<int>(videos.size())));
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < videos.size(); i = next.fetch_add(1)) {
      try {
        slots[i] = process_video(config, videos[i], candidates, vlm_client);
      } catch (const std::exception& e) {
        slots[i].outcome.video_id = videos[i];
        slots[i].outcome.ok = false;
        slots[i].outcome.error = e.what();
      }
    }
  };
  if (worker_count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < worker_count; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  PipelineResult result;
  std::vector<metrics::VideoEval> evals;
  std::vector<vlm::Correction> all_corrections;
  for (VideoWork& work : slots) {
    if (work.outcome.ok) {
      ++result.videos_ok;
      if (work.outcome.has_ground_truth) {
        evals.push_back(metrics::VideoEval{std::move(work.final_labels),
                                           std::move(work.gt_labels)});
      }
    } else {
      ++result.videos_failed;
      std::cerr << "[vseg] video " << work.outcome.video_id
                << " failed: " << work.outcome.error << "\n";
    }
    for (const vlm::Correction& c : work.outcome.corrections) {
      all_corrections.push_back(c);
    }
    result.outcomes.push_back(std::move(work.outcome));
  }

  fs::create_directories(config.output_dir);
  write_text_file(fs::path(config.output_dir) / "selections.json",
                  outcomes_to_json(result.outcomes));
  write_text_file(fs::path(config.output_dir) / "corrections.json",
                  vlm::corrections_to_json(all_corrections));

  if (!evals.empty()) {
    result.report = metrics::evaluate_dataset(evals, config.taxonomy.num_classes(),
                                              config.metric_ks,
                                              config.taxonomy.ignore_labels);
    const std::string report_path =
        config.report_path.empty()
            ? (fs::path(config.output_dir) / "report.json").string()
            : config.report_path;
    write_text_file(report_path, result.report->to_json());
  }
  return result;
}

}  // namespace vseg::pipeline
