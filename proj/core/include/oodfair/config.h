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

#ifndef OODFAIR_CONFIG_H_
#define OODFAIR_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/detection.h"
#include "oodfair/distribution.h"
#include "oodfair/fairness.h"
#include "oodfair/mutation.h"

namespace oodfair {

struct PipelineConfig {
  std::filesystem::path dataset_dir;               // scene JSON directory
  std::optional<nlohmann::json> synthetic;         // or a generated corpus
  std::filesystem::path output_dir = "oodfair-out";
  std::optional<std::filesystem::path> cache_dir;  // detection cache
  std::string dataset_name = "dataset";
  std::uint64_t seed = 0;
  std::optional<int> k;  // nullopt: chosen by silhouette
  int k_max = 8;
  std::vector<MutationOp> ops = {MutationOp::kInsert, MutationOp::kDelete, MutationOp::kRotate};
  std::map<MutationOp, std::vector<std::string>> mutable_classes =
      GenerationConfig::default_classes();
  int iterations = 5;
  OracleMode oracle = OracleMode::kMt;
  std::vector<ErrType> err_types = {ErrType::kExclusion, ErrType::kInclusion};
  int min_class_count = 10;
  bool filtering = true;
  DistributionMode distribution_mode = DistributionMode::kOod;
  bool compare_id_baseline = false;
  std::vector<nlohmann::json> subjects;  // {"type": "simulated"|"http", ...}
  int surplus_max = 2;
  double bin_width_deg = 5.0;
  RelativeSizeTable sizes = RelativeSizeTable::defaults();
  InsertionConfig insertion = InsertionConfig::defaults();
  int parallelism = 1;

  // Relative paths resolve against `base_dir`. Throws ConfigError.
  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);

  void validate() const;
  nlohmann::json to_json() const;
  // Hash of every field that can change results (paths and parallelism are
  // left out).
  std::string digest() const;

  GenerationConfig generation(DistributionMode mode) const;
};

std::vector<std::unique_ptr<Detector>> make_subjects(const PipelineConfig& config);

}  // namespace oodfair

#endif  // OODFAIR_CONFIG_H_
