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

#ifndef OODFAIR_HTTP_DETECTOR_H_
#define OODFAIR_HTTP_DETECTOR_H_

#include <string>

#include <nlohmann/json.hpp>

#include "oodfair/detection.h"

namespace oodfair {

enum class HttpPayload { kScene, kImagePpm };

struct HttpDetectorConfig {
  std::string subject_id;
  std::string endpoint;  // scheme://host:port
  std::string path = "/detect";
  HttpPayload payload = HttpPayload::kScene;
  int attempts = 3;
  double initial_backoff_s = 0.5;  // doubled after every failed attempt
  double timeout_s = 30.0;

  void validate() const;
  nlohmann::json to_json() const;
  static HttpDetectorConfig from_json(const nlohmann::json& j);
};

// Client for an external recognition service. The service decides its own
// confidence threshold; this side only counts the labels it returns.
class HttpDetector final : public Detector {
 public:
  explicit HttpDetector(HttpDetectorConfig config);

  const std::string& subject_id() const override { return config_.subject_id; }
  std::string config_digest() const override { return digest_; }
  // Throws SubjectUnavailable after `attempts` failed requests and
  // ProtocolError when a 200 response does not carry {"counts": {...}}.
  DetectionRecord detect(const Scene& scene) const override;

 private:
  HttpDetectorConfig config_;
  std::string digest_;
};

}  // namespace oodfair

#endif  // OODFAIR_HTTP_DETECTOR_H_
