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

#ifndef OODFAIR_DISTRIBUTION_H_
#define OODFAIR_DISTRIBUTION_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/rng.h"
#include "oodfair/scene.h"

namespace oodfair {

// Number of orientation bins of width `bin_width_deg` covering [0, 360).
int orientation_bin_count(double bin_width_deg);
int orientation_bin(double deg, double bin_width_deg);

// Learned envelope of one class within a cluster: the observed per-scene
// instance count range and the set of orientation bins seen.
struct ClassDistribution {
  std::string class_label;
  int min_count = 0;
  int max_count = 0;
  std::set<int> theta_bins;

  bool operator==(const ClassDistribution&) const = default;
};

struct ClusterDistribution {
  int cluster_index = 0;
  double bin_width_deg = 5.0;
  std::map<std::string, ClassDistribution> per_class;
  std::vector<std::string> source_scene_ids;

  int bin_count() const { return orientation_bin_count(bin_width_deg); }
  // Throws UnknownClass.
  const ClassDistribution& at(std::string_view label) const;

  bool operator==(const ClusterDistribution&) const = default;
};

ClusterDistribution learn_distribution(std::span<const Scene* const> scenes,
                                       const std::set<std::string>& class_universe,
                                       double bin_width_deg, int cluster_index = 0);
ClusterDistribution learn_distribution(std::span<const Scene> scenes,
                                       const std::set<std::string>& class_universe,
                                       double bin_width_deg, int cluster_index = 0);

enum class OodReason { kBelowMin, kAboveMax, kNovelOrientation };

std::string_view ood_reason_name(OodReason reason);

struct OodVerdict {
  bool ood = false;
  std::optional<OodReason> reason;  // first satisfied condition

  bool operator==(const OodVerdict&) const = default;
};

// A scene is out of distribution for a class when its instance count falls
// below min_count, exceeds max_count, or any instance sits in an orientation
// bin the cluster never showed. Conditions are checked in that order.
OodVerdict is_ood(const Scene& scene, const ClusterDistribution& dist,
                  std::string_view class_label);

enum class MutationOp { kInsert, kDelete, kRotate };

std::string_view mutation_op_name(MutationOp op);
std::optional<MutationOp> parse_mutation_op(std::string_view name);

// Number of objects an operator touches. insert: the smallest count that
// pushes the class past max_count, plus a uniform surplus in [0, surplus_max];
// delete: every instance; rotate: one.
int mutation_count(int count_in_image, const ClusterDistribution& dist,
                   std::string_view class_label, MutationOp op, int surplus_max, Rng& rng);

// In-distribution insertion count: uniform over the counts that keep the
// class inside [min_count, max_count]; nullopt when not even one insertion
// fits.
std::optional<int> in_distribution_insert_count(int count_in_image,
                                                const ClusterDistribution& dist,
                                                std::string_view class_label, Rng& rng);

nlohmann::json distribution_to_json(const ClusterDistribution& dist);
ClusterDistribution distribution_from_json(const nlohmann::json& j);

}  // namespace oodfair

#endif  // OODFAIR_DISTRIBUTION_H_
