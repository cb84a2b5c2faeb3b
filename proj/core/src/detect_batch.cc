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

#include "oodfair/detect_batch.h"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "oodfair/scene_io.h"

namespace oodfair {

std::string cache_key(const Scene& scene, const Detector& subject) {
  std::string material = canonical_json(scene);
  material.push_back('\0');
  material += subject.subject_id();
  material.push_back('\0');
  material += subject.config_digest();
  return sha256_hex(material);
}

ResultCache::ResultCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ResultCache::path_for(const std::string& key) const {
  return root_ / key.substr(0, 2) / (key + ".json");
}

std::optional<DetectionRecord> ResultCache::get(const std::string& key) const {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    return detection_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entry: recompute and overwrite
  }
}

void ResultCache::put(const std::string& key, const DetectionRecord& record) const {
  write_file_atomic(path_for(key), detection_to_json(record).dump());
}

BatchResult detect_batch(std::span<const Scene> scenes,
                         std::span<const Detector* const> subjects,
                         const std::optional<std::filesystem::path>& cache_dir, int parallelism) {
  if (parallelism < 1) throw Error(ErrorCode::kConfig, "parallelism must be >= 1");
  std::optional<ResultCache> cache;
  if (cache_dir) cache.emplace(*cache_dir);

  struct Slot {
    std::optional<DetectionRecord> record;
    std::optional<BatchFailure> failure;
  };
  const std::size_t total = scenes.size() * subjects.size();
  std::vector<Slot> slots(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> queries{0};
  std::atomic<std::size_t> hits{0};

  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const Scene& scene = scenes[i / subjects.size()];
      const Detector& subject = *subjects[i % subjects.size()];
      try {
        std::string key;
        if (cache) {
          key = cache_key(scene, subject);
          if (auto hit = cache->get(key)) {
            ++hits;
            slots[i].record = std::move(*hit);
            continue;
          }
        }
        ++queries;
        DetectionRecord rec = subject.detect(scene);
        if (cache) cache->put(key, rec);
        slots[i].record = std::move(rec);
      } catch (const Error& e) {
        slots[i].failure = BatchFailure{scene.scene_id, subject.subject_id(), e.code(), e.what()};
      } catch (const std::exception& e) {
        slots[i].failure =
            BatchFailure{scene.scene_id, subject.subject_id(), ErrorCode::kStageFailure, e.what()};
      }
    }
  };

  const int workers = static_cast<int>(std::min<std::size_t>(parallelism, std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  BatchResult out;
  out.queries = queries;
  out.cache_hits = hits;
  for (auto& s : slots) {
    if (s.record) out.records.push_back(std::move(*s.record));
    if (s.failure) out.failures.push_back(std::move(*s.failure));
  }
  std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.scene_id, a.subject_id) < std::tie(b.scene_id, b.subject_id);
  });
  std::sort(out.failures.begin(), out.failures.end(), [](const auto& a, const auto& b) {
    return std::tie(a.scene_id, a.subject_id) < std::tie(b.scene_id, b.subject_id);
  });
  return out;
}

std::string records_to_jsonl(std::span<const DetectionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += detection_to_json(r).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<DetectionRecord> records_from_jsonl(std::string_view text) {
  std::vector<DetectionRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(detection_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace oodfair
