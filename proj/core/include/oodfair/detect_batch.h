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

#ifndef OODFAIR_DETECT_BATCH_H_
#define OODFAIR_DETECT_BATCH_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oodfair/detection.h"
#include "oodfair/errors.h"

namespace oodfair {

// SHA-256 of canonical scene JSON, subject id and subject config digest.
std::string cache_key(const Scene& scene, const Detector& subject);

// Content-addressed store of DetectionRecords: <root>/<hex[0:2]>/<hex>.json.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path root);

  std::filesystem::path path_for(const std::string& key) const;
  std::optional<DetectionRecord> get(const std::string& key) const;
  void put(const std::string& key, const DetectionRecord& record) const;

 private:
  std::filesystem::path root_;
};

struct BatchFailure {
  std::string scene_id;
  std::string subject_id;
  ErrorCode code = ErrorCode::kStageFailure;
  std::string message;
};

struct BatchResult {
  std::vector<DetectionRecord> records;   // sorted by (scene_id, subject_id)
  std::vector<BatchFailure> failures;     // same order
  std::size_t queries = 0;                // detector calls actually made
  std::size_t cache_hits = 0;
};

// Runs every subject on every scene with up to `parallelism` workers. A failed
// item becomes a BatchFailure; the rest of the batch continues.
BatchResult detect_batch(std::span<const Scene> scenes,
                         std::span<const Detector* const> subjects,
                         const std::optional<std::filesystem::path>& cache_dir, int parallelism);

std::string records_to_jsonl(std::span<const DetectionRecord> records);
std::vector<DetectionRecord> records_from_jsonl(std::string_view text);

}  // namespace oodfair

#endif  // OODFAIR_DETECT_BATCH_H_
