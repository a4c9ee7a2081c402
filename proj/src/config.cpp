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

#include "vseg/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "nlohmann/json.hpp"
#include "vseg/common.hpp"

using nlohmann::json;

namespace vseg::config {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

TaxonomyConfig parse_taxonomy(const json& j) {
  check_keys(j,
             {"num_classes", "class_names", "ignore_labels", "confusable_groups",
              "palette"},
             "taxonomy");
  TaxonomyConfig tax;
  if (j.contains("class_names")) {
    tax.class_names = j.at("class_names").get<std::vector<std::string>>();
    if (j.contains("num_classes") &&
        j.at("num_classes").get<int>() != static_cast<int>(tax.class_names.size())) {
      throw ConfigError("taxonomy: num_classes contradicts the class_names length");
    }
  } else if (j.contains("num_classes")) {
    const int n = j.at("num_classes").get<int>();
    if (n < 1) throw ConfigError("taxonomy.num_classes must be >= 1");
    for (int i = 0; i < n; ++i) tax.class_names.push_back("class_" + std::to_string(i));
  }
  if (j.contains("ignore_labels")) {
    tax.ignore_labels.clear();
    for (const auto& v : j.at("ignore_labels")) {
      tax.ignore_labels.insert(v.get<uint16_t>());
    }
  }
  if (j.contains("confusable_groups")) {
    for (const json& g : j.at("confusable_groups")) {
      check_keys(g, {"stuff", "members"}, "taxonomy.confusable_groups[]");
      vlm::ConfusableGroup group;
      group.stuff_name = g.at("stuff").get<std::string>();
      for (const json& m : g.at("members")) {
        check_keys(m, {"id", "name"}, "taxonomy.confusable_groups[].members[]");
        vlm::ClassRef member;
        member.id = m.at("id").get<uint16_t>();
        member.name = m.at("name").get<std::string>();
        group.members.push_back(std::move(member));
      }
      tax.confusable_groups.push_back(std::move(group));
    }
  }
  if (j.contains("palette")) {
    for (const auto& entry : j.at("palette")) {
      if (!entry.is_array() || entry.size() != 3) {
        throw ConfigError("taxonomy.palette entries must be [r,g,b] triples");
      }
      tax.palette.push_back({entry[0].get<uint8_t>(), entry[1].get<uint8_t>(),
                             entry[2].get<uint8_t>()});
    }
  }
  return tax;
}

json taxonomy_to_json(const TaxonomyConfig& tax) {
  json j;
  j["class_names"] = tax.class_names;
  j["ignore_labels"] = std::vector<uint16_t>(tax.ignore_labels.begin(),
                                             tax.ignore_labels.end());
  json groups = json::array();
  for (const vlm::ConfusableGroup& group : tax.confusable_groups) {
    json g;
    g["stuff"] = group.stuff_name;
    json members = json::array();
    for (const vlm::ClassRef& member : group.members) {
      members.push_back({{"id", member.id}, {"name", member.name}});
    }
    g["members"] = std::move(members);
    groups.push_back(std::move(g));
  }
  j["confusable_groups"] = std::move(groups);
  json palette = json::array();
  for (const auto& rgb : tax.palette) palette.push_back({rgb[0], rgb[1], rgb[2]});
  j["palette"] = std::move(palette);
  return j;
}

}  // namespace

void TaxonomyConfig::validate() const {
  if (class_names.empty()) {
    throw ConfigError("taxonomy: class_names (or num_classes) is required");
  }
  if (class_names.size() > 65535) {
    throw ConfigError("taxonomy: too many classes for 16-bit labels");
  }
  std::set<std::string> seen;
  for (const std::string& name : class_names) {
    if (name.empty()) throw ConfigError("taxonomy: empty class name");
    if (!seen.insert(name).second) {
      throw ConfigError("taxonomy: duplicate class name '" + name + "'");
    }
  }
  try {
    for (const vlm::ConfusableGroup& group : confusable_groups) {
      group.validate(num_classes());
    }
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  if (!palette.empty() && palette.size() != class_names.size()) {
    throw ConfigError("taxonomy: palette must have one entry per class (" +
                      std::to_string(class_names.size()) + " classes, " +
                      std::to_string(palette.size()) + " palette entries)");
  }
}

void VlmSettings::validate() const {
  if (mode != "off" && mode != "mock" && mode != "http") {
    throw ConfigError("vlm.mode must be one of off, mock, http (got '" + mode + "')");
  }
  if (mode == "http" && endpoint.empty()) {
    throw ConfigError("vlm.mode http requires vlm.endpoint");
  }
  if (!(min_pixel_fraction >= 0.0 && min_pixel_fraction <= 1.0)) {
    throw ConfigError("vlm.min_pixel_fraction must be in [0,1]");
  }
  if (timeout_seconds < 1) throw ConfigError("vlm.timeout_seconds must be >= 1");
}

void PipelineConfig::validate() const {
  if (dataset_root.empty()) throw ConfigError("dataset_root is required");
  if (output_dir.empty()) throw ConfigError("output_dir is required");
  if (prediction_roots.empty()) {
    throw ConfigError("at least one prediction root is required");
  }
  if (prediction_roots.size() > 2) {
    throw ConfigError("at most two candidate models are supported (got " +
                      std::to_string(prediction_roots.size()) + ")");
  }
  if (!candidate_names.empty() && candidate_names.size() != prediction_roots.size()) {
    throw ConfigError("candidate_names must match prediction_roots in length");
  }
  if (candidate_names.size() == 2 && candidate_names[0] == candidate_names[1]) {
    throw ConfigError("candidate_names must be distinct");
  }
  if (augs.empty()) throw ConfigError("augs must not be empty");
  std::set<int> ranks;
  for (const tta::AugSpec& aug : augs) {
    if (!(aug.scale > 0.0)) throw ConfigError("augs: scale must be > 0");
    if (!ranks.insert(aug.precedence_rank).second) {
      throw ConfigError("augs: duplicate precedence rank " +
                        std::to_string(aug.precedence_rank));
    }
  }
  for (int k : metric_ks) {
    if (k < 1) throw ConfigError("metric_ks entries must be >= 1");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  taxonomy.validate();
  vlm.validate();
  try {
    farneback.validate();
    ssim.validate();
    mask.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
}

PipelineConfig default_config() {
  PipelineConfig config;
  config.augs = tta::default_ensemble();
  return config;
}

PipelineConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j,
               {"dataset_root", "prediction_roots", "candidate_names", "output_dir",
                "report_path", "taxonomy", "farneback", "ssim", "mask", "augs",
                "metric_ks", "vlm", "workers", "seed"},
               "config root");
    PipelineConfig config = default_config();
    read_field(j, "dataset_root", config.dataset_root);
    read_field(j, "prediction_roots", config.prediction_roots);
    read_field(j, "candidate_names", config.candidate_names);
    read_field(j, "output_dir", config.output_dir);
    read_field(j, "report_path", config.report_path);
    if (j.contains("taxonomy")) config.taxonomy = parse_taxonomy(j.at("taxonomy"));
    if (j.contains("farneback")) {
      const json& f = j.at("farneback");
      check_keys(f,
                 {"pyr_scale", "levels", "winsize", "iterations", "poly_n", "poly_sigma",
                  "regularization_eps"},
                 "farneback");
      read_field(f, "pyr_scale", config.farneback.pyr_scale);
      read_field(f, "levels", config.farneback.levels);
      read_field(f, "winsize", config.farneback.winsize);
      read_field(f, "iterations", config.farneback.iterations);
      read_field(f, "poly_n", config.farneback.poly_n);
      read_field(f, "poly_sigma", config.farneback.poly_sigma);
      read_field(f, "regularization_eps", config.farneback.regularization_eps);
    }
    if (j.contains("ssim")) {
      const json& s = j.at("ssim");
      check_keys(s, {"k1", "k2", "dynamic_range"}, "ssim");
      read_field(s, "k1", config.ssim.k1);
      read_field(s, "k2", config.ssim.k2);
      read_field(s, "dynamic_range", config.ssim.dynamic_range);
    }
    if (j.contains("mask")) {
      const json& m = j.at("mask");
      check_keys(m, {"patch_size", "mask_ratio", "lambda", "seed"}, "mask");
      read_field(m, "patch_size", config.mask.patch_size);
      read_field(m, "mask_ratio", config.mask.mask_ratio);
      read_field(m, "lambda", config.mask.lambda);
      read_field(m, "seed", config.mask.seed);
    }
    if (j.contains("augs")) {
      config.augs.clear();
      for (const json& a : j.at("augs")) {
        check_keys(a, {"scale", "flip", "rank"}, "augs[]");
        tta::AugSpec spec;
        read_field(a, "scale", spec.scale);
        read_field(a, "flip", spec.flipped);
        read_field(a, "rank", spec.precedence_rank);
        config.augs.push_back(spec);
      }
    }
    if (j.contains("metric_ks")) {
      config.metric_ks.clear();
      for (const auto& v : j.at("metric_ks")) config.metric_ks.insert(v.get<int>());
    }
    if (j.contains("vlm")) {
      const json& v = j.at("vlm");
      check_keys(v,
                 {"mode", "endpoint", "token_env", "min_pixel_fraction",
                  "timeout_seconds", "mock_answers", "mock_default_answer"},
                 "vlm");
      read_field(v, "mode", config.vlm.mode);
      read_field(v, "endpoint", config.vlm.endpoint);
      read_field(v, "token_env", config.vlm.token_env);
      read_field(v, "min_pixel_fraction", config.vlm.min_pixel_fraction);
      read_field(v, "timeout_seconds", config.vlm.timeout_seconds);
      if (v.contains("mock_answers")) {
        config.vlm.mock_answers =
            v.at("mock_answers").get<std::map<std::string, std::string>>();
      }
      read_field(v, "mock_default_answer", config.vlm.mock_default_answer);
    }
    read_field(j, "workers", config.workers);
    read_field(j, "seed", config.seed);
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }
}

PipelineConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const PipelineConfig& config) {
  json j;
  j["dataset_root"] = config.dataset_root;
  j["prediction_roots"] = config.prediction_roots;
  j["candidate_names"] = config.candidate_names;
  j["output_dir"] = config.output_dir;
  j["report_path"] = config.report_path;
  j["taxonomy"] = taxonomy_to_json(config.taxonomy);
  j["farneback"] = {{"pyr_scale", config.farneback.pyr_scale},
                    {"levels", config.farneback.levels},
                    {"winsize", config.farneback.winsize},
                    {"iterations", config.farneback.iterations},
                    {"poly_n", config.farneback.poly_n},
                    {"poly_sigma", config.farneback.poly_sigma},
                    {"regularization_eps", config.farneback.regularization_eps}};
  j["ssim"] = {{"k1", config.ssim.k1},
               {"k2", config.ssim.k2},
               {"dynamic_range", config.ssim.dynamic_range}};
  j["mask"] = {{"patch_size", config.mask.patch_size},
               {"mask_ratio", config.mask.mask_ratio},
               {"lambda", config.mask.lambda},
               {"seed", config.mask.seed}};
  json augs = json::array();
  for (const tta::AugSpec& aug : config.augs) {
    augs.push_back(
        {{"scale", aug.scale}, {"flip", aug.flipped}, {"rank", aug.precedence_rank}});
  }
  j["augs"] = std::move(augs);
  j["metric_ks"] = std::vector<int>(config.metric_ks.begin(), config.metric_ks.end());
  j["vlm"] = {{"mode", config.vlm.mode},
              {"endpoint", config.vlm.endpoint},
              {"token_env", config.vlm.token_env},
              {"min_pixel_fraction", config.vlm.min_pixel_fraction},
              {"timeout_seconds", config.vlm.timeout_seconds},
              {"mock_answers", config.vlm.mock_answers},
              {"mock_default_answer", config.vlm.mock_default_answer}};
  j["workers"] = config.workers;
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

}  // namespace vseg::config
