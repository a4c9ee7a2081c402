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

#include "vseg/vlm.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "nlohmann/json.hpp"

namespace vseg::vlm {

namespace {

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// First whole-word occurrence of `needle` in `haystack` (both already
/// lower-cased), or npos. Word boundaries are non-alphanumeric characters.
size_t find_whole_word(const std::string& haystack, const std::string& needle) {
  size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    const size_t end = pos + needle.size();
    const bool right_ok = end >= haystack.size() || !is_word_char(haystack[end]);
    if (left_ok && right_ok) return pos;
    ++pos;
  }
  return std::string::npos;
}

}  // namespace

void ConfusableGroup::validate(int num_classes) const {
  if (stuff_name.empty()) {
    throw InvalidInputError("ConfusableGroup: stuff_name must be non-empty");
  }
  if (members.size() < 2) {
    throw InvalidInputError("ConfusableGroup '" + stuff_name +
                            "': needs at least two members");
  }
  std::set<std::string> names;
  for (const ClassRef& member : members) {
    if (member.name.empty()) {
      throw InvalidInputError("ConfusableGroup '" + stuff_name +
                              "': member display names must be non-empty");
    }
    if (!names.insert(to_lower(member.name)).second) {
      throw InvalidInputError("ConfusableGroup '" + stuff_name +
                              "': duplicate member name '" + member.name + "'");
    }
    if (num_classes > 0 && member.id >= num_classes) {
      throw InvalidInputError("ConfusableGroup '" + stuff_name + "': member id " +
                              std::to_string(member.id) + " outside taxonomy of " +
                              std::to_string(num_classes) + " classes");
    }
  }
}

std::string build_prompt(const ConfusableGroup& group) {
  group.validate();
  std::string joined;
  for (size_t i = 0; i < group.members.size(); ++i) {
    if (i > 0) joined += (i + 1 == group.members.size()) ? " or " : ", ";
    joined += group.members[i].name;
  }
  return "Is the " + group.stuff_name + " in the image a " + joined +
         "? Please give me the only answer.";
}

ClassRef parse_answer(const std::string& text, const ConfusableGroup& group) {
  if (text.empty()) throw InvalidInputError("parse_answer: empty answer text");
  const std::string haystack = to_lower(text);
  size_t best_pos = std::string::npos;
  const ClassRef* best = nullptr;
  for (const ClassRef& member : group.members) {
    const size_t pos = find_whole_word(haystack, to_lower(member.name));
    if (pos != std::string::npos && (best == nullptr || pos < best_pos)) {
      best_pos = pos;
      best = &member;
    }
  }
  if (best == nullptr) {
    throw UnparseableAnswerError("no member of group '" + group.stuff_name +
                                 "' mentioned in answer: " + text);
  }
  return *best;
}

std::vector<Detection> detect_confusables(const std::vector<LabelMap>& labels,
                                          const std::vector<ConfusableGroup>& groups,
                                          double min_pixel_fraction) {
  if (labels.empty()) throw InvalidInputError("detect_confusables: empty video");
  if (!(min_pixel_fraction >= 0.0 && min_pixel_fraction <= 1.0)) {
    throw InvalidInputError("detect_confusables: min_pixel_fraction must be in [0,1]");
  }
  uint64_t total_pixels = 0;
  for (const LabelMap& frame : labels) total_pixels += frame.data.size();

  std::vector<Detection> fired;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const ConfusableGroup& group = groups[gi];
    group.validate();
    std::set<uint16_t> member_ids;
    for (const ClassRef& member : group.members) member_ids.insert(member.id);

    uint64_t union_pixels = 0;
    uint64_t best_count = 0;
    int best_frame = 0;
    for (size_t t = 0; t < labels.size(); ++t) {
      uint64_t frame_count = 0;
      for (uint16_t v : labels[t].data) frame_count += member_ids.count(v);
      union_pixels += frame_count;
      if (frame_count > best_count) {
        best_count = frame_count;
        best_frame = static_cast<int>(t);
      }
    }
    const double fraction =
        total_pixels ? static_cast<double>(union_pixels) / total_pixels : 0.0;
    if (union_pixels > 0 && fraction >= min_pixel_fraction) {
      Detection d;
      d.group_index = static_cast<int>(gi);
      d.representative_frame = best_frame;
      d.member_pixels = union_pixels;
      d.pixel_fraction = fraction;
      fired.push_back(d);
    }
  }
  return fired;
}

std::pair<std::vector<LabelMap>, Correction> relabel_video(
    const std::vector<LabelMap>& labels, const ConfusableGroup& group,
    uint16_t chosen, const std::string& video_id) {
  group.validate();
  const ClassRef* chosen_ref = nullptr;
  std::set<uint16_t> member_ids;
  for (const ClassRef& member : group.members) {
    member_ids.insert(member.id);
    if (member.id == chosen) chosen_ref = &member;
  }
  if (chosen_ref == nullptr) {
    throw InvalidInputError("relabel_video: class " + std::to_string(chosen) +
                            " is not a member of group '" + group.stuff_name + "'");
  }

  Correction correction;
  correction.video_id = video_id;
  correction.group = group;
  correction.chosen_class = chosen;
  correction.chosen_name = chosen_ref->name;

  std::vector<LabelMap> out;
  out.reserve(labels.size());
  for (const LabelMap& frame : labels) {
    LabelMap rewritten = frame;
    int64_t changed = 0;
    for (uint16_t& v : rewritten.data) {
      if (v != chosen && member_ids.count(v)) {
        v = chosen;
        ++changed;
      }
    }
    if (changed > 0) {
      correction.frames_touched += 1;
      correction.pixels_relabelled += changed;
    }
    out.push_back(std::move(rewritten));
  }
  return {std::move(out), std::move(correction)};
}

std::string VlmClient::ask_about_video(const std::string& /*video_id*/,
                                       const std::string& prompt,
                                       const RgbFrame& image) {
  return ask(prompt, image);
}

void MockVlmClient::set_answer(const std::string& video_id, const std::string& answer) {
  std::lock_guard<std::mutex> lock(mutex_);
  answers_[video_id] = answer;
}

void MockVlmClient::set_default_answer(const std::string& answer) {
  std::lock_guard<std::mutex> lock(mutex_);
  default_answer_ = answer;
  has_default_ = true;
}

std::string MockVlmClient::ask(const std::string& prompt, const RgbFrame& image) {
  return ask_about_video("", prompt, image);
}

std::string MockVlmClient::ask_about_video(const std::string& video_id,
                                           const std::string& prompt,
                                           const RgbFrame& /*image*/) {
  std::lock_guard<std::mutex> lock(mutex_);
  queries_.push_back(Query{video_id, prompt});
  auto it = answers_.find(video_id);
  if (it != answers_.end()) return it->second;
  if (has_default_) return default_answer_;
  throw VlmTransportError("mock client has no canned answer for video '" + video_id + "'");
}

std::vector<MockVlmClient::Query> MockVlmClient::queries() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return queries_;
}

std::pair<std::vector<LabelMap>, std::vector<Correction>> apply_vlm_corrections(
    const std::string& video_id, const std::vector<RgbFrame>& frames,
    const std::vector<LabelMap>& labels, const std::vector<ConfusableGroup>& groups,
    double min_pixel_fraction, VlmClient& client) {
  if (frames.size() != labels.size() || frames.empty()) {
    throw InvalidInputError("apply_vlm_corrections: frame/label count mismatch");
  }
  std::vector<LabelMap> current = labels;
  std::vector<Correction> corrections;
  const std::vector<Detection> detections =
      detect_confusables(current, groups, min_pixel_fraction);
  for (const Detection& detection : detections) {
    const ConfusableGroup& group = groups[detection.group_index];
    const std::string prompt = build_prompt(group);
    try {
      const std::string answer = client.ask_about_video(
          video_id, prompt, frames[detection.representative_frame]);
      const ClassRef chosen = parse_answer(answer, group);
      auto [rewritten, correction] = relabel_video(current, group, chosen.id, video_id);
      current = std::move(rewritten);
      corrections.push_back(std::move(correction));
    } catch (const UnparseableAnswerError&) {
      continue;  // fail open: leave this group's labels untouched
    } catch (const VlmTransportError&) {
      continue;  // fail open
    }
  }
  return {std::move(current), std::move(corrections)};
}

std::string corrections_to_json(const std::vector<Correction>& corrections) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Correction& c : corrections) {
    nlohmann::json j;
    j["video_id"] = c.video_id;
    j["stuff"] = c.group.stuff_name;
    nlohmann::json members = nlohmann::json::array();
    for (const ClassRef& m : c.group.members) {
      members.push_back({{"id", m.id}, {"name", m.name}});
    }
    j["members"] = std::move(members);
    j["chosen_class"] = c.chosen_class;
    j["chosen_name"] = c.chosen_name;
    j["frames_touched"] = c.frames_touched;
    j["pixels_relabelled"] = c.pixels_relabelled;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

namespace {
constexpr char kBase64Chars[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}  // namespace

std::string base64_encode(const std::vector<uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kBase64Chars[(v >> 18) & 63];
    out += kBase64Chars[(v >> 12) & 63];
    out += kBase64Chars[(v >> 6) & 63];
    out += kBase64Chars[v & 63];
  }
  const size_t rest = bytes.size() - i;
  if (rest == 1) {
    const uint32_t v = bytes[i] << 16;
    out += kBase64Chars[(v >> 18) & 63];
    out += kBase64Chars[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kBase64Chars[(v >> 18) & 63];
    out += kBase64Chars[(v >> 12) & 63];
    out += kBase64Chars[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::vector<uint8_t> out;
  uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    const int v = value_of(c);
    if (v < 0) throw FormatError("base64_decode: invalid character in input");
    acc = (acc << 6) | static_cast<uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

}  // namespace vseg::vlm
