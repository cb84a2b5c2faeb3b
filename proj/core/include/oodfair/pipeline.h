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

#ifndef OODFAIR_PIPELINE_H_
#define OODFAIR_PIPELINE_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "oodfair/config.h"

namespace oodfair {

inline constexpr std::array<std::string_view, 7> kStages = {
    "ingest", "cluster", "learn-dist", "mutate", "detect", "analyze", "report"};

struct StageRecord {
  bool done = false;
  long long count = 0;
  double seconds = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

struct RunManifest {
  std::string config_digest;
  std::map<std::string, StageRecord> stages;
  std::optional<std::string> failed_stage;
  std::string failure;

  bool done(std::string_view stage) const;
  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// Stage outputs live under config.output_dir; every stage reads its inputs
// back from disk, so any stage can resume from an earlier run.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  // Runs every stage not yet marked complete.
  const RunManifest& run();
  // Recomputes one stage and clears the markers of the stages after it.
  // Throws StageFailure when a predecessor has not completed.
  void run_stage(std::string_view stage);

  const RunManifest& manifest() const { return manifest_; }
  const PipelineConfig& config() const { return config_; }
  std::filesystem::path reports_dir() const { return config_.output_dir / "reports"; }

 private:
  long long stage_ingest(nlohmann::json& details);
  long long stage_cluster(nlohmann::json& details);
  long long stage_learn(nlohmann::json& details);
  long long stage_mutate(nlohmann::json& details);
  long long stage_detect(nlohmann::json& details);
  long long stage_analyze(nlohmann::json& details);
  long long stage_report(nlohmann::json& details);

  std::vector<std::string> mutant_sets() const;
  void save_manifest() const;

  PipelineConfig config_;
  RunManifest manifest_;
};

}  // namespace oodfair

#endif  // OODFAIR_PIPELINE_H_
