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

#ifndef OODFAIR_MUTATION_H_
#define OODFAIR_MUTATION_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/clustering.h"
#include "oodfair/distribution.h"
#include "oodfair/scene.h"
#include "oodfair/segmentation.h"

namespace oodfair {

// Object height relative to the reference class at equal depth. The shipped
// defaults are calibration values for the synthetic road scenes, not
// measured constants.
struct RelativeSizeTable {
  std::string reference_class = "car";
  std::map<std::string, double> ratios;

  static RelativeSizeTable defaults();
  bool has(std::string_view label) const;
  double ratio(std::string_view label) const;
  // ratios[reference_class] == 1 and every ratio > 0; throws ConfigError.
  void validate() const;

  nlohmann::json to_json() const;
  static RelativeSizeTable from_json(const nlohmann::json& j);
};

struct InsertionConfig {
  std::map<std::string, double> aspect_ratios;  // width / height per class
  double default_aspect_ratio = 1.0;
  // Intersection over the smaller box above this counts as obstruction.
  double occlusion_threshold = 0.15;
  int max_attempts = 50;  // candidate positions per inserted object
  int min_height_px = 2;
  std::optional<GridResolution> resolution;  // segmentation grid; canvas by default

  static InsertionConfig defaults();
  double aspect_ratio(std::string_view label) const;
};

// Reference-class pixel height as a linear function of the bottom edge row.
struct ScalingModel {
  double height_at_mid = 0.0;  // at y = canvas height / 2
  double slope = 0.0;          // pixels of height per pixel of y
  double mid_y = 0.0;

  double reference_height(double bottom_y) const {
    return height_at_mid + slope * (bottom_y - mid_y);
  }
};

// Least-squares line through (bottom_y, height / ratio) of every object whose
// class has a relative size. Throws InsufficientReferences when fewer than two
// such objects exist or they all share one bottom row.
ScalingModel compute_scaling_factor(const Scene& scene, const RelativeSizeTable& table);

enum class SkipReason {
  kNoFeasiblePlacement,
  kInsufficientReferences,
  kNothingToDelete,
  kNoUnobstructedInstance,
  kNoNovelOrientation,
  kNoInDistributionVariant,
};

std::string_view skip_reason_name(SkipReason reason);

struct MutationSpec {
  MutationOp op = MutationOp::kInsert;
  std::string target_class;
  int count = 1;
  std::uint64_t seed = 0;
  std::string source_scene_id;
  int iteration = 0;
};

struct MutationResult {
  MutationSpec spec;
  std::optional<Scene> mutant;  // absent when skipped
  std::vector<std::string> touched_ids;  // inserted, removed or rotated
  OodVerdict ood;
  std::optional<SkipReason> skip;

  bool skipped() const { return skip.has_value(); }
};

// Places `count` objects of `class_label` on free ground, sized by the
// scene's scaling model. Either every object is placed or the whole
// operation is skipped.
MutationResult insert_objects(const Scene& scene, const ClusterDistribution& dist,
                              const std::string& class_label, int count,
                              const RelativeSizeTable& table, const InsertionConfig& config,
                              std::uint64_t seed);

// Removes every instance of the class. `dist`, when given, is used to tag the
// mutant's OOD status.
MutationResult delete_class(const Scene& scene, const std::string& class_label,
                            const ClusterDistribution* dist = nullptr);

// Turns one unobstructed instance to an orientation bin the cluster has not
// seen. Box size and every other field stay unchanged.
MutationResult rotate_object(const Scene& scene, const ClusterDistribution& dist,
                             const std::string& class_label, std::uint64_t seed,
                             double occlusion_threshold = 0.15);

enum class DistributionMode { kOod, kId };

struct GenerationConfig {
  std::vector<MutationOp> ops = {MutationOp::kInsert, MutationOp::kDelete,
                                 MutationOp::kRotate};
  std::map<MutationOp, std::vector<std::string>> classes;
  int iterations = 5;  // insert and rotate; deletion always runs once
  int surplus_max = 2;
  DistributionMode mode = DistributionMode::kOod;
  RelativeSizeTable sizes = RelativeSizeTable::defaults();
  InsertionConfig insertion = InsertionConfig::defaults();
  std::uint64_t seed = 0;

  static std::map<MutationOp, std::vector<std::string>> default_classes();
};

// Id of the mutant generated from `spec`: <source>__<op>_<class>_<iteration>.
// In-distribution mutants carry an "id-" op prefix so both sets can share one
// detection store.
std::string mutant_id(const MutationSpec& spec, DistributionMode mode = DistributionMode::kOod);

// One attempt per (cluster, op, class, scene, iteration). Skipped attempts are
// kept in the output with their reason.
std::vector<MutationResult> generate_ood_set(const Dataset& dataset,
                                             const ClusterAssignment& assignment,
                                             const std::vector<ClusterDistribution>& dists,
                                             const GenerationConfig& config);

// Sidecar record: source, op, class, count, seed, ood, reason.
nlohmann::json provenance_json(const MutationResult& result);

}  // namespace oodfair

#endif  // OODFAIR_MUTATION_H_
