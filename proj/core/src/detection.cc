/*
 * Copyright 2026 The oodfair Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oodfair/detection.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "oodfair/errors.h"
#include "oodfair/rng.h"

namespace oodfair {

int DetectionRecord::count(std::string_view label) const {
  auto it = counts.find(std::string(label));
  return it == counts.end() ? 0 : it->second;
}

nlohmann::json detection_to_json(const DetectionRecord& r) {
  return {{"scene_id", r.scene_id}, {"subject_id", r.subject_id}, {"counts", r.counts}};
}

DetectionRecord detection_from_json(const nlohmann::json& j) {
  DetectionRecord r;
  r.scene_id = j.at("scene_id").get<std::string>();
  r.subject_id = j.at("subject_id").get<std::string>();
  r.counts = j.at("counts").get<ClassCounts>();
  for (const auto& [label, n] : r.counts) {
    if (n < 0) throw Error(ErrorCode::kProtocolError, "negative count for '" + label + "'");
  }
  return r;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(len * 2);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

void SimulatedDetectorConfig::validate() const {
  auto prob = [](double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kConfig, what + " must be in [0, 1]");
  };
  if (subject_id.empty()) throw Error(ErrorCode::kConfig, "subject_id must not be empty");
  prob(default_recall, "default_recall");
  for (const auto& [label, r] : per_class_recall) prob(r, "recall for '" + label + "'");
  prob(crowding_penalty, "crowding_penalty");
  prob(min_visible_fraction, "min_visible_fraction");
  if (crowding_threshold < 0) throw Error(ErrorCode::kConfig, "crowding_threshold must be >= 0");
  for (const auto& rule : confusion_pairs) prob(rule.probability, "confusion probability");
}

double SimulatedDetectorConfig::recall(std::string_view label) const {
  auto it = per_class_recall.find(std::string(label));
  return it == per_class_recall.end() ? default_recall : it->second;
}

nlohmann::json SimulatedDetectorConfig::to_json() const {
  nlohmann::json confusion = nlohmann::json::array();
  for (const auto& r : confusion_pairs) {
    confusion.push_back({{"from", r.from}, {"to", r.to}, {"probability", r.probability}});
  }
  nlohmann::json j = {{"type", "simulated"},
                      {"subject_id", subject_id},
                      {"per_class_recall", per_class_recall},
                      {"default_recall", default_recall},
                      {"crowding_penalty", crowding_penalty},
                      {"crowding_threshold", crowding_threshold},
                      {"confusion_pairs", confusion},
                      {"min_visible_fraction", min_visible_fraction},
                      {"seed", seed}};
  if (resolution) j["resolution"] = {resolution->cols, resolution->rows};
  return j;
}

SimulatedDetectorConfig SimulatedDetectorConfig::from_json(const nlohmann::json& j) {
  SimulatedDetectorConfig c;
  c.subject_id = j.value("subject_id", c.subject_id);
  if (j.contains("per_class_recall")) {
    c.per_class_recall = j.at("per_class_recall").get<std::map<std::string, double>>();
  }
  c.default_recall = j.value("default_recall", c.default_recall);
  c.crowding_penalty = j.value("crowding_penalty", c.crowding_penalty);
  c.crowding_threshold = j.value("crowding_threshold", c.crowding_threshold);
  c.min_visible_fraction = j.value("min_visible_fraction", c.min_visible_fraction);
  c.seed = j.value("seed", c.seed);
  if (j.contains("confusion_pairs")) {
    for (const auto& r : j.at("confusion_pairs")) {
      c.confusion_pairs.push_back({r.at("from").get<std::string>(), r.at("to").get<std::string>(),
                                   r.at("probability").get<double>()});
    }
  }
  if (j.contains("resolution")) {
    const auto& res = j.at("resolution");
    c.resolution = GridResolution{res.at(0).get<int>(), res.at(1).get<int>()};
  }
  c.validate();
  return c;
}

SimulatedDetector::SimulatedDetector(SimulatedDetectorConfig config) : config_(std::move(config)) {
  config_.validate();
  digest_ = sha256_hex(config_.to_json().dump());
}

std::vector<double> visible_fractions(const Scene& scene, std::optional<GridResolution> resolution) {
  const SegmentationGrid grid = derive_segmentation(scene, resolution);
  std::vector<double> out;
  out.reserve(scene.objects.size());
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const Box& b = scene.objects[i].bbox;
    const long long total = grid.cells_in(b);
    if (total == 0) {
      out.push_back(1.0);  // smaller than one cell: treat as unoccluded
      continue;
    }
    out.push_back(static_cast<double>(grid.cells_owned(b, static_cast<std::int32_t>(i))) / total);
  }
  return out;
}

DetectionRecord SimulatedDetector::detect(const Scene& scene) const {
  DetectionRecord rec{scene.scene_id, config_.subject_id, {}};
  const std::vector<double> visible = visible_fractions(scene, config_.resolution);
  const int total = static_cast<int>(scene.objects.size());
  const double crowding =
      std::pow(1.0 - config_.crowding_penalty, std::max(0, total - config_.crowding_threshold));
  const std::uint64_t scene_seed = derive_seed(config_.seed, scene.scene_id);

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    if (visible[i] < config_.min_visible_fraction) continue;
    Rng rng(derive_seed(scene_seed, o.instance_id));
    const double recall = std::clamp(config_.recall(o.class_label) * crowding, 0.0, 1.0);
    if (!rng.bernoulli(recall)) continue;
    std::string label = o.class_label;
    for (const auto& rule : config_.confusion_pairs) {
      if (rule.from == o.class_label && rng.bernoulli(rule.probability)) {
        label = rule.to;
        break;
      }
    }
    ++rec.counts[label];
  }
  return rec;
}

}  // namespace oodfair
