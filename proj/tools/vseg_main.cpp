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
// vseg — video segmentation post-processing toolkit.
//
// Subcommands mirror the pipeline stages so each can be run and inspected on
// its own: vote (TTA ensemble fusion), score / aggregate (temporal
// consistency selection between two candidate models), mask (block-mask
// augmentation), vlm-fix (confusable-class correction), eval (mIoU / mVC),
// flow (dense optical flow), pipeline (everything end to end).
//
// Exit codes: 0 success, 1 partial or runtime failure, 2 configuration error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "vseg/config.hpp"
#include "vseg/consistency.hpp"
#include "vseg/dataset.hpp"
#include "vseg/flow.hpp"
#include "vseg/flow_io.hpp"
#include "vseg/image_io.hpp"
#include "vseg/metrics.hpp"
#include "vseg/mvc.hpp"
#include "vseg/pipeline.hpp"
#include "vseg/tta.hpp"
#include "vseg/vlm.hpp"

namespace fs = std::filesystem;
using namespace vseg;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string videos;       // comma-separated id filter
  int workers = 0;          // 0 = keep config value
  std::optional<uint64_t> seed;
  std::string vlm_endpoint;
  std::string vlm_token_env;
  std::string out_dir;
  std::string report_path;
};

std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> ids;
  std::stringstream ss(csv);
  std::string id;
  while (std::getline(ss, id, ',')) {
    if (!id.empty()) ids.push_back(id);
  }
  return ids;
}

config::PipelineConfig load_config(const CommonOpts& opts, bool required) {
  config::PipelineConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = config::load_config_file(opts.config_path);
  } else if (required) {
    throw ConfigError("--config is required for this subcommand");
  } else {
    cfg = config::default_config();
  }
  if (opts.workers > 0) cfg.workers = opts.workers;
  if (opts.seed) {
    cfg.seed = *opts.seed;
    cfg.mask.seed = *opts.seed;
  }
  if (!opts.vlm_endpoint.empty()) {
    cfg.vlm.endpoint = opts.vlm_endpoint;
    cfg.vlm.mode = "http";
  }
  if (!opts.vlm_token_env.empty()) cfg.vlm.token_env = opts.vlm_token_env;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (!opts.report_path.empty()) cfg.report_path = opts.report_path;
  return cfg;
}

/// Resolve the video list: configured dataset videos, optionally filtered.
std::vector<std::string> resolve_videos(const config::PipelineConfig& cfg,
                                        const std::string& filter_csv) {
  std::vector<std::string> videos = filter_csv.empty()
                                        ? dataset::list_videos(cfg.dataset_root)
                                        : split_ids(filter_csv);
  if (videos.empty()) throw EmptyInputError("no videos selected");
  return videos;
}

void print_metric_table(const metrics::MetricReport& report, const std::set<int>& ks) {
  std::printf("%-10s", "");
  for (int k : ks) std::printf("  %8s", ("mVC" + std::to_string(k)).c_str());
  std::printf("  %8s\n", "mIoU");
  std::printf("%-10s", "overall");
  for (int k : ks) {
    auto it = report.mvc.find(k);
    if (it != report.mvc.end()) {
      std::printf("  %8.4f", it->second);
    } else {
      std::printf("  %8s", "n/a");
    }
  }
  std::printf("  %8.4f\n", report.miou);
}

/// Vote one candidate's ensembles for the selected videos; returns stems and
/// voted maps per video.
struct VotedVideo {
  std::string video_id;
  std::vector<std::string> stems;
  std::vector<RgbFrame> frames;
  std::optional<std::vector<LabelMap>> gt;
  std::vector<LabelMap> labels;
};

VotedVideo vote_video(const config::PipelineConfig& cfg, const std::string& pred_root,
                      const std::string& video_id) {
  const int num_classes = cfg.taxonomy.num_classes();
  VotedVideo voted;
  voted.video_id = video_id;
  dataset::VideoData video = dataset::load_video_dir(cfg.dataset_root, video_id,
                                                     num_classes,
                                                     cfg.taxonomy.ignore_labels);
  const dataset::EnsembleData ensemble = dataset::load_prediction_ensemble(
      pred_root, video_id, cfg.augs, num_classes, cfg.taxonomy.ignore_labels);
  if (ensemble.stems != video.stems) {
    throw InvalidInputError("prediction stems under " + pred_root + "/" + video_id +
                            " do not match the video's frame stems");
  }
  for (size_t t = 0; t < ensemble.per_frame.size(); ++t) {
    std::vector<std::pair<LabelMap, tta::AugSpec>> views;
    for (const tta::EnsemblePrediction& pred : ensemble.per_frame[t]) {
      views.emplace_back(tta::normalize_prediction(pred, video.frames[t].width,
                                                   video.frames[t].height),
                         pred.aug);
    }
    voted.labels.push_back(tta::majority_vote(views));
  }
  voted.stems = std::move(video.stems);
  voted.frames = std::move(video.frames);
  voted.gt = std::move(video.masks);
  return voted;
}

int run_vote(const CommonOpts& opts, int candidate_index) {
  config::PipelineConfig cfg = load_config(opts, true);
  cfg.validate();
  if (cfg.output_dir.empty()) throw ConfigError("--out (or output_dir) is required");
  if (candidate_index < 0 ||
      candidate_index >= static_cast<int>(cfg.prediction_roots.size())) {
    throw ConfigError("candidate index " + std::to_string(candidate_index) +
                      " out of range");
  }
  int failed = 0;
  for (const std::string& video_id : resolve_videos(cfg, opts.videos)) {
    try {
      VotedVideo voted =
          vote_video(cfg, cfg.prediction_roots[candidate_index], video_id);
      dataset::write_label_tree(cfg.output_dir, video_id, voted.stems, voted.labels);
      std::cerr << "[vseg] voted " << video_id << " (" << voted.labels.size()
                << " frames)\n";
    } catch (const std::exception& e) {
      std::cerr << "[vseg] video " << video_id << " failed: " << e.what() << "\n";
      ++failed;
    }
  }
  return failed ? 1 : 0;
}

int run_score(const CommonOpts& opts) {
  config::PipelineConfig cfg = load_config(opts, true);
  cfg.validate();
  const std::vector<std::string> candidates =
      cfg.candidate_names.empty()
          ? std::vector<std::string>{"model_a", "model_b"}
          : cfg.candidate_names;
  int failed = 0;
  std::printf("%-16s  %-10s  %10s  %6s\n", "video", "candidate", "score", "pairs");
  for (const std::string& video_id : resolve_videos(cfg, opts.videos)) {
    try {
      VotedVideo first = vote_video(cfg, cfg.prediction_roots[0], video_id);
      std::vector<GrayFrame> gray;
      for (const RgbFrame& frame : first.frames) gray.push_back(to_gray(frame));
      for (size_t c = 0; c < cfg.prediction_roots.size(); ++c) {
        std::vector<LabelMap> labels =
            c == 0 ? first.labels
                   : vote_video(cfg, cfg.prediction_roots[c], video_id).labels;
        const consistency::VideoScore score = consistency::temporal_consistency_score(
            video_id, candidates[c], gray, labels, cfg.farneback, cfg.ssim,
            cfg.taxonomy.num_classes());
        std::printf("%-16s  %-10s  %10.6f  %6d\n", video_id.c_str(),
                    candidates[c].c_str(), score.score, score.pairs_scored);
      }
    } catch (const std::exception& e) {
      std::cerr << "[vseg] video " << video_id << " failed: " << e.what() << "\n";
      ++failed;
    }
  }
  return failed ? 1 : 0;
}

int run_aggregate(const CommonOpts& opts) {
  config::PipelineConfig cfg = load_config(opts, true);
  cfg.validate();
  if (cfg.prediction_roots.size() != 2) {
    throw ConfigError("aggregate needs exactly two prediction_roots");
  }
  if (cfg.output_dir.empty()) throw ConfigError("--out (or output_dir) is required");
  const std::vector<std::string> candidates =
      cfg.candidate_names.empty()
          ? std::vector<std::string>{"model_a", "model_b"}
          : cfg.candidate_names;
  int failed = 0;
  std::vector<pipeline::VideoOutcome> outcomes;
  for (const std::string& video_id : resolve_videos(cfg, opts.videos)) {
    pipeline::VideoOutcome outcome;
    outcome.video_id = video_id;
    try {
      VotedVideo a = vote_video(cfg, cfg.prediction_roots[0], video_id);
      VotedVideo b = vote_video(cfg, cfg.prediction_roots[1], video_id);
      std::vector<GrayFrame> gray;
      for (const RgbFrame& frame : a.frames) gray.push_back(to_gray(frame));
      const consistency::VideoScore sa = consistency::temporal_consistency_score(
          video_id, candidates[0], gray, a.labels, cfg.farneback, cfg.ssim,
          cfg.taxonomy.num_classes());
      const consistency::VideoScore sb = consistency::temporal_consistency_score(
          video_id, candidates[1], gray, b.labels, cfg.farneback, cfg.ssim,
          cfg.taxonomy.num_classes());
      const auto selection = consistency::select_per_video({sa}, {sb});
      const bool pick_b = selection.at(video_id) == candidates[1];
      outcome.scores = {sa.score, sb.score};
      outcome.selected_candidate = selection.at(video_id);
      dataset::write_label_tree(cfg.output_dir, video_id, a.stems,
                                pick_b ? b.labels : a.labels);
      outcome.ok = true;
      std::printf("%-16s  selected %-10s  (%.6f vs %.6f)\n", video_id.c_str(),
                  outcome.selected_candidate.c_str(), sa.score, sb.score);
    } catch (const std::exception& e) {
      outcome.error = e.what();
      std::cerr << "[vseg] video " << video_id << " failed: " << e.what() << "\n";
      ++failed;
    }
    outcomes.push_back(std::move(outcome));
  }
  std::ofstream out(fs::path(cfg.output_dir) / "selections.json",
                    std::ios::binary | std::ios::trunc);
  out << pipeline::outcomes_to_json(outcomes);
  return failed ? 1 : 0;
}

int run_mask(const CommonOpts& opts) {
  config::PipelineConfig cfg = load_config(opts, true);
  cfg.validate();
  if (cfg.output_dir.empty()) throw ConfigError("--out (or output_dir) is required");
  int failed = 0;
  for (const std::string& video_id : resolve_videos(cfg, opts.videos)) {
    try {
      const dataset::VideoData video = dataset::load_video_dir(
          cfg.dataset_root, video_id, std::max(1, cfg.taxonomy.num_classes()),
          cfg.taxonomy.ignore_labels);
      const fs::path dir = fs::path(cfg.output_dir) / video_id;
      fs::create_directories(dir);
      double kept_sum = 0.0;
      for (size_t t = 0; t < video.frames.size(); ++t) {
        const mvc::PatchMask mask = mvc::sample_patch_mask(
            video.frames[t].width, video.frames[t].height, cfg.mask,
            mvc::frame_stream_id(video_id, static_cast<int>(t)));
        kept_sum += mask.kept_fraction();
        io::write_rgb_png(mvc::apply_mask(video.frames[t], mask),
                          (dir / (video.stems[t] + ".png")).string());
      }
      std::printf("%-16s  %zu frames, mean kept fraction %.4f\n", video_id.c_str(),
                  video.frames.size(), kept_sum / video.frames.size());
    } catch (const std::exception& e) {
      std::cerr << "[vseg] video " << video_id << " failed: " << e.what() << "\n";
      ++failed;
    }
  }
  return failed ? 1 : 0;
}

int run_vlm_fix(const CommonOpts& opts, const std::string& labels_root) {
  config::PipelineConfig cfg = load_config(opts, true);
  cfg.validate();
  if (cfg.output_dir.empty()) throw ConfigError("--out (or output_dir) is required");
  if (labels_root.empty()) throw ConfigError("--labels is required");
  if (cfg.vlm.mode == "off") {
    throw ConfigError("vlm.mode is 'off'; set mode mock/http or pass --vlm-endpoint");
  }

  std::unique_ptr<vlm::MockVlmClient> mock;
  std::unique_ptr<vlm::HttpVlmClient> http;
  vlm::VlmClient* client = nullptr;
  if (cfg.vlm.mode == "mock") {
    mock = std::make_unique<vlm::MockVlmClient>();
    for (const auto& [video_id, answer] : cfg.vlm.mock_answers) {
      mock->set_answer(video_id, answer);
    }
    if (!cfg.vlm.mock_default_answer.empty()) {
      mock->set_default_answer(cfg.vlm.mock_default_answer);
    }
    client = mock.get();
  } else {
    http = std::make_unique<vlm::HttpVlmClient>(cfg.vlm.endpoint, cfg.vlm.token_env,
                                                cfg.vlm.timeout_seconds);
    client = http.get();
  }

  const std::vector<tta::AugSpec> identity{tta::AugSpec{1.0, false, 0}};
  int failed = 0;
  std::vector<vlm::Correction> all;
  for (const std::string& video_id : resolve_videos(cfg, opts.videos)) {
    try {
      const dataset::VideoData video = dataset::load_video_dir(
          cfg.dataset_root, video_id, cfg.taxonomy.num_classes(),
          cfg.taxonomy.ignore_labels);
      const dataset::EnsembleData data = dataset::load_prediction_ensemble(
          labels_root, video_id, identity, cfg.taxonomy.num_classes(),
          cfg.taxonomy.ignore_labels);
      if (data.stems != video.stems) {
        throw InvalidInputError("label stems under " + labels_root + "/" + video_id +
                                " do not match the video's frame stems");
      }
      std::vector<LabelMap> labels;
      for (const auto& frame_preds : data.per_frame) {
        labels.push_back(frame_preds[0].labels);
      }
      auto [fixed, corrections] = vlm::apply_vlm_corrections(
          video_id, video.frames, labels, cfg.taxonomy.confusable_groups,
          cfg.vlm.min_pixel_fraction, *client);
      dataset::write_label_tree(cfg.output_dir, video_id, data.stems, fixed);
      for (vlm::Correction& c : corrections) all.push_back(std::move(c));
      std::cerr << "[vseg] fixed " << video_id << " (" << corrections.size()
                << " corrections)\n";
    } catch (const std::exception& e) {
      std::cerr << "[vseg] video " << video_id << " failed: " << e.what() << "\n";
      ++failed;
    }
  }
  std::ofstream out(fs::path(cfg.output_dir) / "corrections.json",
                    std::ios::binary | std::ios::trunc);
  out << vlm::corrections_to_json(all);
  return failed ? 1 : 0;
}

int run_eval(const CommonOpts& opts, const std::string& pred_root) {
  config::PipelineConfig cfg = load_config(opts, true);
  cfg.taxonomy.validate();
  if (cfg.dataset_root.empty()) throw ConfigError("dataset_root is required");
  if (pred_root.empty()) throw ConfigError("--pred is required");

  const std::vector<tta::AugSpec> identity{tta::AugSpec{1.0, false, 0}};
  std::vector<metrics::VideoEval> evals;
  int failed = 0;
  for (const std::string& video_id : resolve_videos(cfg, opts.videos)) {
    try {
      const dataset::VideoData video = dataset::load_video_dir(
          cfg.dataset_root, video_id, cfg.taxonomy.num_classes(),
          cfg.taxonomy.ignore_labels);
      if (!video.masks) {
        throw InvalidInputError("no ground-truth masks for video " + video_id);
      }
      const dataset::EnsembleData data = dataset::load_prediction_ensemble(
          pred_root, video_id, identity, cfg.taxonomy.num_classes(),
          cfg.taxonomy.ignore_labels);
      if (data.stems != video.stems) {
        throw InvalidInputError("prediction stems under " + pred_root + "/" + video_id +
                                " do not match the video's frame stems");
      }
      metrics::VideoEval eval;
      for (const auto& frame_preds : data.per_frame) {
        eval.preds.push_back(frame_preds[0].labels);
      }
      eval.gts = *video.masks;
      evals.push_back(std::move(eval));
    } catch (const std::exception& e) {
      std::cerr << "[vseg] video " << video_id << " failed: " << e.what() << "\n";
      ++failed;
    }
  }
  if (evals.empty()) {
    std::cerr << "[vseg] nothing evaluated\n";
    return 1;
  }
  const metrics::MetricReport report = metrics::evaluate_dataset(
      evals, cfg.taxonomy.num_classes(), cfg.metric_ks, cfg.taxonomy.ignore_labels);
  print_metric_table(report, cfg.metric_ks);
  if (!opts.report_path.empty()) {
    std::ofstream out(opts.report_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + opts.report_path + " for writing");
    out << report.to_json();
  }
  return failed ? 1 : 0;
}

int run_flow(const std::string& prev_path, const std::string& next_path,
             const std::string& flo_out, const std::string& warp_labels,
             const std::string& warped_out, const CommonOpts& opts) {
  config::PipelineConfig cfg = load_config(opts, false);
  const GrayFrame prev = to_gray(io::read_rgb(prev_path));
  const GrayFrame next = to_gray(io::read_rgb(next_path));
  const FlowField field = flow::farneback_flow(prev, next, cfg.farneback);
  if (!flo_out.empty()) io::write_flow(field, flo_out);

  double mean_mag = 0.0, max_mag = 0.0;
  for (size_t i = 0; i < field.pixel_count(); ++i) {
    const double fx = field.data[2 * i], fy = field.data[2 * i + 1];
    const double mag = std::sqrt(fx * fx + fy * fy);
    mean_mag += mag;
    max_mag = std::max(max_mag, mag);
  }
  mean_mag /= static_cast<double>(field.pixel_count());
  std::printf("flow %dx%d  mean |f| = %.4f px  max |f| = %.4f px\n", field.width,
              field.height, mean_mag, max_mag);

  if (!warp_labels.empty()) {
    if (warped_out.empty()) throw ConfigError("--warped-out is required with --warp");
    const int num_classes = std::max(1, cfg.taxonomy.num_classes());
    const LabelMap labels = io::read_label_png(warp_labels, num_classes);
    const flow::WarpResult warped = flow::warp_labels(labels, field);
    io::write_label_png(warped.labels, warped_out);
    size_t valid = 0;
    for (uint8_t v : warped.validity.data) valid += v ? 1 : 0;
    std::printf("warp: %zu/%zu pixels valid\n", valid, warped.validity.data.size());
  }
  return 0;
}

int run_pipeline_cmd(const CommonOpts& opts) {
  config::PipelineConfig cfg = load_config(opts, true);
  const pipeline::PipelineResult result =
      pipeline::run_pipeline(cfg, split_ids(opts.videos));
  std::printf("%d video(s) ok, %d failed\n", result.videos_ok, result.videos_failed);
  if (result.report) print_metric_table(*result.report, cfg.metric_ks);
  return result.videos_failed ? 1 : 0;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_vlm = true) {
  cmd->add_option("--config", opts.config_path, "JSON configuration file");
  cmd->add_option("--videos", opts.videos, "comma-separated video id filter");
  cmd->add_option("--workers", opts.workers, "worker thread count override");
  cmd->add_option("--seed", opts.seed, "randomness seed override");
  if (with_vlm) {
    cmd->add_option("--vlm-endpoint", opts.vlm_endpoint,
                    "VLM HTTP endpoint (switches vlm.mode to http)");
    cmd->add_option("--vlm-token-env", opts.vlm_token_env,
                    "environment variable holding the VLM bearer token");
  }
  cmd->add_option("--out", opts.out_dir, "output directory override");
  cmd->add_option("--report", opts.report_path, "metric report JSON path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"video segmentation post-processing toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  int candidate_index = 0;
  std::string pred_root, labels_root;
  std::string flow_prev, flow_next, flo_out, warp_labels, warped_out;

  CLI::App* vote = app.add_subcommand(
      "vote", "fuse one candidate's augmentation ensemble by per-pixel vote");
  add_common(vote, opts, false);
  vote->add_option("--candidate", candidate_index,
                   "candidate index into prediction_roots (default 0)");

  CLI::App* score = app.add_subcommand(
      "score", "temporal-consistency score per video and candidate");
  add_common(score, opts, false);

  CLI::App* aggregate = app.add_subcommand(
      "aggregate", "vote both candidates, keep the more consistent one per video");
  add_common(aggregate, opts, false);

  CLI::App* mask = app.add_subcommand(
      "mask", "write block-masked copies of the input frames");
  add_common(mask, opts, false);

  CLI::App* vlm_fix = app.add_subcommand(
      "vlm-fix", "relabel confusable stuff classes using a VLM");
  add_common(vlm_fix, opts);
  vlm_fix->add_option("--labels", labels_root, "input label tree (<root>/<video>/<stem>.png)");

  CLI::App* eval = app.add_subcommand(
      "eval", "mIoU and video-consistency metrics for a prediction tree");
  add_common(eval, opts, false);
  eval->add_option("--pred", pred_root, "prediction tree (<root>/<video>/<stem>.png)");

  CLI::App* flow_cmd = app.add_subcommand(
      "flow", "dense optical flow between two frames (Middlebury .flo output)");
  flow_cmd->add_option("prev", flow_prev, "first frame (png/jpg)")->required();
  flow_cmd->add_option("next", flow_next, "second frame (png/jpg)")->required();
  flow_cmd->add_option("--config", opts.config_path, "JSON configuration file");
  flow_cmd->add_option("-o,--out", flo_out, "output .flo path");
  flow_cmd->add_option("--warp", warp_labels,
                       "label PNG aligned with `next`, pulled back onto `prev`'s grid");
  flow_cmd->add_option("--warped-out", warped_out, "output PNG for --warp");

  CLI::App* pipe = app.add_subcommand("pipeline", "full pipeline run");
  add_common(pipe, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (vote->parsed()) return run_vote(opts, candidate_index);
    if (score->parsed()) return run_score(opts);
    if (aggregate->parsed()) return run_aggregate(opts);
    if (mask->parsed()) return run_mask(opts);
    if (vlm_fix->parsed()) return run_vlm_fix(opts, labels_root);
    if (eval->parsed()) return run_eval(opts, pred_root);
    if (flow_cmd->parsed()) {
      return run_flow(flow_prev, flow_next, flo_out, warp_labels, warped_out, opts);
    }
    if (pipe->parsed()) return run_pipeline_cmd(opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
