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

#include "oodfair/http_detector.h"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "oodfair/errors.h"
#include "oodfair/raster.h"
#include "oodfair/scene_io.h"

namespace oodfair {

void HttpDetectorConfig::validate() const {
  if (subject_id.empty()) throw Error(ErrorCode::kConfig, "http subject needs a subject_id");
  if (endpoint.empty()) throw Error(ErrorCode::kConfig, subject_id + ": endpoint is empty");
  if (attempts < 1) throw Error(ErrorCode::kConfig, subject_id + ": attempts must be >= 1");
  if (initial_backoff_s < 0.0) throw Error(ErrorCode::kConfig, subject_id + ": negative backoff");
}

nlohmann::json HttpDetectorConfig::to_json() const {
  return {{"type", "http"},
          {"subject_id", subject_id},
          {"endpoint", endpoint},
          {"path", path},
          {"payload", payload == HttpPayload::kScene ? "scene" : "image_ppm_b64"},
          {"attempts", attempts},
          {"initial_backoff_s", initial_backoff_s},
          {"timeout_s", timeout_s}};
}

HttpDetectorConfig HttpDetectorConfig::from_json(const nlohmann::json& j) {
  HttpDetectorConfig c;
  c.subject_id = j.at("subject_id").get<std::string>();
  c.endpoint = j.at("endpoint").get<std::string>();
  c.path = j.value("path", c.path);
  const std::string payload = j.value("payload", std::string("scene"));
  if (payload == "scene") {
    c.payload = HttpPayload::kScene;
  } else if (payload == "image_ppm_b64") {
    c.payload = HttpPayload::kImagePpm;
  } else {
    throw Error(ErrorCode::kConfig, "unknown payload '" + payload + "'");
  }
  c.attempts = j.value("attempts", c.attempts);
  c.initial_backoff_s = j.value("initial_backoff_s", c.initial_backoff_s);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.validate();
  return c;
}

HttpDetector::HttpDetector(HttpDetectorConfig config) : config_(std::move(config)) {
  config_.validate();
  // Retry policy does not change answers, so it stays out of the digest.
  nlohmann::json identity = {{"endpoint", config_.endpoint},
                             {"path", config_.path},
                             {"payload", config_.to_json()["payload"]},
                             {"subject_id", config_.subject_id}};
  digest_ = sha256_hex(identity.dump());
}

DetectionRecord HttpDetector::detect(const Scene& scene) const {
  nlohmann::json body;
  if (config_.payload == HttpPayload::kScene) {
    body["scene"] = scene_to_json(scene);
  } else {
    body["image_ppm_b64"] = base64_encode(render_ppm(scene));
  }
  const std::string payload = body.dump();

  httplib::Client client(config_.endpoint);
  const auto timeout = std::chrono::duration<double>(config_.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  std::string last_error;
  for (int attempt = 0; attempt < config_.attempts; ++attempt) {
    if (attempt > 0) {
      const double wait = config_.initial_backoff_s * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    auto res = client.Post(config_.path, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    DetectionRecord rec{scene.scene_id, config_.subject_id, {}};
    try {
      const auto j = nlohmann::json::parse(res->body);
      for (const auto& [label, n] : j.at("counts").items()) {
        const int v = n.get<int>();
        if (v < 0) throw std::runtime_error("negative count");
        if (v > 0) rec.counts[label] = v;
      }
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kProtocolError,
                  config_.subject_id + ": malformed response for " + scene.scene_id + ": " +
                      e.what());
    }
    return rec;
  }
  throw Error(ErrorCode::kSubjectUnavailable,
              config_.subject_id + ": " + std::to_string(config_.attempts) +
                  " attempts failed for " + scene.scene_id + " (" + last_error + ")");
}

}  // namespace oodfair
