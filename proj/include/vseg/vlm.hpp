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
// Vision-language-model label correction: detect videos dominated by groups
// of easily-confused stuff classes, ask a VLM which member is actually
// present, and relabel the whole video to the chosen member.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vseg/common.hpp"
#include "vseg/image.hpp"

namespace vseg::vlm {

struct ClassRef {
  uint16_t id = 0;
  std::string name;
};

/// A set of classes a segmenter tends to confuse (e.g. water surfaces that
/// could be river, lake or sea). Members keep their configured order.
struct ConfusableGroup {
  std::string stuff_name;        // e.g. "water"
  std::vector<ClassRef> members; // >= 2, display names unique within group

  /// Throws when the group has fewer than two members, duplicate display
  /// names, or (when num_classes > 0) a member id outside the taxonomy.
  void validate(int num_classes = 0) const;
};

/// "Is the {stuff} in the image a {m1, m2, … or mN}? Please give me the only
/// answer." — members joined with ", " and a final " or ".
std::string build_prompt(const ConfusableGroup& group);

/// Case-insensitive whole-word scan for member display names; the member
/// with the earliest first occurrence wins. No member mentioned raises an
/// unparseable-answer error and the caller must leave labels untouched.
ClassRef parse_answer(const std::string& text, const ConfusableGroup& group);

struct Detection {
  int group_index = 0;            // position in the configured group list
  int representative_frame = 0;   // frame with this group's highest pixel count
  uint64_t member_pixels = 0;     // union of member pixels across the video
  double pixel_fraction = 0.0;    // member_pixels / total pixels in the video
};

/// A group fires when the union of its members' pixels across the video
/// reaches min_pixel_fraction of all pixels. Results follow the configured
/// group order; the representative frame is the earliest frame attaining the
/// group's maximum per-frame pixel count.
std::vector<Detection> detect_confusables(const std::vector<LabelMap>& labels,
                                          const std::vector<ConfusableGroup>& groups,
                                          double min_pixel_fraction);

struct Correction {
  std::string video_id;
  ConfusableGroup group;
  uint16_t chosen_class = 0;
  std::string chosen_name;
  int64_t frames_touched = 0;     // frames where at least one pixel changed
  int64_t pixels_relabelled = 0;  // total pixels changed across the video
};

/// Rewrite every pixel whose label is a group member to `chosen` in every
/// frame; all other pixels are copied bit-identically. Idempotent.
std::pair<std::vector<LabelMap>, Correction> relabel_video(
    const std::vector<LabelMap>& labels, const ConfusableGroup& group,
    uint16_t chosen, const std::string& video_id);

/// Answer source for confusable-class queries. Implementations must not
/// mutate pipeline state; they either return the model's answer text or
/// throw a transport error.
class VlmClient {
 public:
  virtual ~VlmClient() = default;
  virtual std::string ask(const std::string& prompt, const RgbFrame& image) = 0;
  /// Same query with the video id attached for clients that key on it
  /// (e.g. the mock). Default forwards to ask().
  virtual std::string ask_about_video(const std::string& video_id,
                                      const std::string& prompt,
                                      const RgbFrame& image);
};

/// Deterministic stand-in for tests and offline runs: canned answer per
/// video id with an optional fallback. Safe to share across threads; every
/// query is recorded for later inspection.
class MockVlmClient : public VlmClient {
 public:
  struct Query {
    std::string video_id;
    std::string prompt;
  };

  void set_answer(const std::string& video_id, const std::string& answer);
  void set_default_answer(const std::string& answer);

  std::string ask(const std::string& prompt, const RgbFrame& image) override;
  std::string ask_about_video(const std::string& video_id, const std::string& prompt,
                              const RgbFrame& image) override;

  std::vector<Query> queries() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> answers_;
  std::string default_answer_;
  bool has_default_ = false;
  std::vector<Query> queries_;
};

/// Live client: HTTP POST of JSON {"prompt": …, "image_base64": …} to the
/// endpoint, expecting JSON {"text": …}. The bearer token is read from the
/// named environment variable when that name is non-empty; connection
/// failures, non-2xx statuses and malformed replies raise transport errors.
class HttpVlmClient : public VlmClient {
 public:
  HttpVlmClient(std::string endpoint_url, std::string token_env_var,
                int timeout_seconds = 30);

  std::string ask(const std::string& prompt, const RgbFrame& image) override;

 private:
  std::string endpoint_url_;
  std::string token_env_var_;
  int timeout_seconds_;
};

/// One video's full correction pass: detect groups, query the client once
/// per fired group (representative frame attached), parse, relabel.
/// Unparseable answers and transport errors skip that group and leave its
/// labels untouched — post-processing never destroys upstream results.
std::pair<std::vector<LabelMap>, std::vector<Correction>> apply_vlm_corrections(
    const std::string& video_id, const std::vector<RgbFrame>& frames,
    const std::vector<LabelMap>& labels, const std::vector<ConfusableGroup>& groups,
    double min_pixel_fraction, VlmClient& client);

/// JSON array of correction records for the pipeline's correction log.
std::string corrections_to_json(const std::vector<Correction>& corrections);

std::string base64_encode(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> base64_decode(const std::string& text);

}  // namespace vseg::vlm
