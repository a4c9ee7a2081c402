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

#include "vseg/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>

#include "vseg/common.hpp"
#include "vseg/image_io.hpp"

namespace fs = std::filesystem;

namespace vseg::dataset {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// stem -> full path for every file in `dir` whose extension is in `exts`,
/// sorted by stem. Duplicate stems (e.g. 0001.png and 0001.jpg) are errors.
std::vector<std::pair<std::string, std::string>> list_by_stem(
    const fs::path& dir, const std::vector<std::string>& exts) {
  std::map<std::string, std::string> by_stem;
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower(entry.path().extension().string());
    if (std::find(exts.begin(), exts.end(), ext) == exts.end()) continue;
    const std::string stem = entry.path().stem().string();
    if (!by_stem.emplace(stem, entry.path().string()).second) {
      throw InvalidInputError("duplicate frame stem '" + stem + "' in " + dir.string());
    }
  }
  return {by_stem.begin(), by_stem.end()};
}

}  // namespace

std::vector<std::string> list_videos(const std::string& root) {
  if (!fs::is_directory(root)) {
    throw IoError("dataset root is not a directory: " + root);
  }
  std::vector<std::string> ids;
  for (const fs::directory_entry& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

VideoData load_video_dir(const std::string& root, const std::string& video_id,
                         int num_classes, const std::set<uint16_t>& ignore_labels) {
  const fs::path video_dir = fs::path(root) / video_id;
  const fs::path frames_dir = video_dir / "frames";
  if (!fs::is_directory(frames_dir)) {
    throw IoError("missing frames directory: " + frames_dir.string());
  }

  VideoData video;
  video.video_id = video_id;
  const auto frame_files = list_by_stem(frames_dir, {".png", ".jpg", ".jpeg"});
  if (frame_files.empty()) {
    throw EmptyInputError("no frames in " + frames_dir.string());
  }
  for (const auto& [stem, path] : frame_files) {
    RgbFrame frame = io::read_rgb(path);
    if (!video.frames.empty() &&
        !same_dims(frame.width, frame.height, video.frames[0].width,
                   video.frames[0].height)) {
      throw InvalidInputError("frame dimensions differ from the rest of the video: " + path);
    }
    video.stems.push_back(stem);
    video.frames.push_back(std::move(frame));
  }

  const fs::path masks_dir = video_dir / "masks";
  if (!fs::is_directory(masks_dir)) return video;

  const auto mask_files = list_by_stem(masks_dir, {".png"});
  if (mask_files.size() != video.stems.size()) {
    throw InvalidInputError("frame/mask count mismatch in " + video_dir.string() + ": " +
                            std::to_string(video.stems.size()) + " frames vs " +
                            std::to_string(mask_files.size()) + " masks");
  }
  const std::vector<uint16_t> ignore_vec(ignore_labels.begin(), ignore_labels.end());
  std::vector<LabelMap> masks;
  for (size_t i = 0; i < mask_files.size(); ++i) {
    const auto& [stem, path] = mask_files[i];
    if (stem != video.stems[i]) {
      throw InvalidInputError("mask stem '" + stem + "' has no matching frame stem '" +
                              video.stems[i] + "' in " + masks_dir.string());
    }
    LabelMap mask = io::read_label_png(path, num_classes);
    if (!same_dims(mask.width, mask.height, video.frames[i].width,
                   video.frames[i].height)) {
      throw InvalidInputError("mask dimensions do not match its frame: " + path);
    }
    validate_labels(mask, num_classes, ignore_vec);
    masks.push_back(std::move(mask));
  }
  video.masks = std::move(masks);
  return video;
}

std::string variant_dir_name(const tta::AugSpec& spec) {
  const int percent = static_cast<int>(std::lround(spec.scale * 100.0));
  std::string name = "s";
  if (percent < 100) name += "0";
  if (percent < 10) name += "0";
  name += std::to_string(percent);
  if (spec.flipped) name += "_flip";
  return name;
}

EnsembleData load_prediction_ensemble(const std::string& pred_root,
                                      const std::string& video_id,
                                      const std::vector<tta::AugSpec>& specs,
                                      int num_classes,
                                      const std::set<uint16_t>& ignore_labels) {
  if (specs.empty()) {
    throw InvalidInputError("load_prediction_ensemble: no augmentation specs");
  }
  const std::vector<uint16_t> ignore_vec(ignore_labels.begin(), ignore_labels.end());
  const fs::path video_dir = fs::path(pred_root) / video_id;
  if (!fs::is_directory(video_dir)) {
    throw IoError("missing prediction directory: " + video_dir.string());
  }

  // Flat layout shortcut: identity-only ensembles may store predictions
  // directly under the video directory.
  const bool identity_only = specs.size() == 1 && !specs[0].flipped &&
                             std::lround(specs[0].scale * 100.0) == 100;
  const fs::path first_variant = video_dir / variant_dir_name(specs[0]);
  const bool flat = identity_only && !fs::is_directory(first_variant);

  EnsembleData out;
  for (size_t si = 0; si < specs.size(); ++si) {
    const fs::path dir = flat ? video_dir : video_dir / variant_dir_name(specs[si]);
    if (!fs::is_directory(dir)) {
      throw IoError("missing prediction variant directory: " + dir.string());
    }
    const auto files = list_by_stem(dir, {".png"});
    if (files.empty()) throw EmptyInputError("no predictions in " + dir.string());
    if (si == 0) {
      for (const auto& [stem, path] : files) out.stems.push_back(stem);
      out.per_frame.resize(files.size());
    } else if (files.size() != out.stems.size()) {
      throw InvalidInputError("variant " + dir.string() + " has " +
                              std::to_string(files.size()) + " frames, expected " +
                              std::to_string(out.stems.size()));
    }
    for (size_t i = 0; i < files.size(); ++i) {
      const auto& [stem, path] = files[i];
      if (stem != out.stems[i]) {
        throw InvalidInputError("prediction stem '" + stem + "' in " + dir.string() +
                                " does not match expected stem '" + out.stems[i] + "'");
      }
      tta::EnsemblePrediction pred;
      pred.aug = specs[si];
      pred.labels = io::read_label_png(path, num_classes);
      try {
        validate_labels(pred.labels, num_classes, ignore_vec);
      } catch (const InvalidInputError& e) {
        throw InvalidInputError(std::string(e.what()) + " in " + path);
      }
      out.per_frame[i].push_back(std::move(pred));
    }
  }
  return out;
}

void write_label_tree(const std::string& out_root, const std::string& video_id,
                      const std::vector<std::string>& stems,
                      const std::vector<LabelMap>& labels) {
  if (stems.size() != labels.size()) {
    throw InvalidInputError("write_label_tree: stem/label count mismatch");
  }
  const fs::path dir = fs::path(out_root) / video_id;
  fs::create_directories(dir);
  for (size_t i = 0; i < stems.size(); ++i) {
    io::write_label_png(labels[i], (dir / (stems[i] + ".png")).string());
  }
}

}  // namespace vseg::dataset
