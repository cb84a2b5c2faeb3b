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

#ifndef OODFAIR_DETECTION_H_
#define OODFAIR_DETECTION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/scene.h"
#include "oodfair/segmentation.h"

namespace oodfair {

// Per-class detected counts for one (scene, subject). Absent classes are 0.
struct DetectionRecord {
  std::string scene_id;
  std::string subject_id;
  ClassCounts counts;

  int count(std::string_view label) const;
  bool operator==(const DetectionRecord&) const = default;
};

nlohmann::json detection_to_json(const DetectionRecord& record);
DetectionRecord detection_from_json(const nlohmann::json& j);

std::string sha256_hex(std::string_view data);

class Detector {
 public:
  virtual ~Detector() = default;
  virtual const std::string& subject_id() const = 0;
  // Changes whenever the detector would answer differently.
  virtual std::string config_digest() const = 0;
  virtual DetectionRecord detect(const Scene& scene) const = 0;
};

struct ConfusionRule {
  std::string from;
  std::string to;
  double probability = 0.0;
};

struct SimulatedDetectorConfig {
  std::string subject_id = "sim";
  std::map<std::string, double> per_class_recall;
  double default_recall = 1.0;
  // Recall is multiplied by (1 - crowding_penalty)^(objects - threshold)
  // once the scene holds more than crowding_threshold objects.
  double crowding_penalty = 0.0;
  int crowding_threshold = 0;
  std::vector<ConfusionRule> confusion_pairs;
  double min_visible_fraction = 0.25;
  std::optional<GridResolution> resolution;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
  double recall(std::string_view label) const;

  nlohmann::json to_json() const;
  static SimulatedDetectorConfig from_json(const nlohmann::json& j);
};

// Object detector stand-in with configurable per-class recall, crowding
// sensitivity and label confusion. Pure in (scene, config).
class SimulatedDetector final : public Detector {
 public:
  explicit SimulatedDetector(SimulatedDetectorConfig config);

  const std::string& subject_id() const override { return config_.subject_id; }
  std::string config_digest() const override { return digest_; }
  DetectionRecord detect(const Scene& scene) const override;

  const SimulatedDetectorConfig& config() const { return config_; }

 private:
  SimulatedDetectorConfig config_;
  std::string digest_;
};

// Visible fraction of each object's box in the segmentation grid.
std::vector<double> visible_fractions(const Scene& scene,
                                      std::optional<GridResolution> resolution = std::nullopt);

}  // namespace oodfair

#endif  // OODFAIR_DETECTION_H_
