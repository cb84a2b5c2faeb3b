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

#include "oodfair/distribution.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oodfair/errors.h"

namespace oodfair {

int orientation_bin_count(double bin_width_deg) {
  if (!(bin_width_deg > 0.0)) throw Error(ErrorCode::kConfig, "bin width must be positive");
  return static_cast<int>(std::ceil(360.0 / bin_width_deg - 1e-9));
}

int orientation_bin(double deg, double bin_width_deg) {
  const int n = orientation_bin_count(bin_width_deg);
  const int b = static_cast<int>(std::floor(normalize_degrees(deg) / bin_width_deg));
  return std::clamp(b, 0, n - 1);
}

const ClassDistribution& ClusterDistribution::at(std::string_view label) const {
  auto it = per_class.find(std::string(label));
  if (it == per_class.end()) {
    throw Error(ErrorCode::kUnknownClass, "class '" + std::string(label) + "' not in universe");
  }
  return it->second;
}

ClusterDistribution learn_distribution(std::span<const Scene* const> scenes,
                                       const std::set<std::string>& class_universe,
                                       double bin_width_deg, int cluster_index) {
  if (scenes.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot learn from no scenes");
  ClusterDistribution d;
  d.cluster_index = cluster_index;
  d.bin_width_deg = bin_width_deg;
  for (const auto& label : class_universe) {
    ClassDistribution cd;
    cd.class_label = label;
    cd.min_count = std::numeric_limits<int>::max();
    cd.max_count = 0;
    d.per_class.emplace(label, std::move(cd));
  }
  for (const Scene* s : scenes) {
    d.source_scene_ids.push_back(s->scene_id);
    const ClassCounts counts = s->instance_counts();
    for (auto& [label, cd] : d.per_class) {
      auto it = counts.find(label);
      const int n = it == counts.end() ? 0 : it->second;
      cd.min_count = std::min(cd.min_count, n);
      cd.max_count = std::max(cd.max_count, n);
    }
    for (const auto& o : s->objects) {
      auto it = d.per_class.find(o.class_label);
      if (it != d.per_class.end()) {
        it->second.theta_bins.insert(orientation_bin(o.orientation_deg, bin_width_deg));
      }
    }
  }
  std::sort(d.source_scene_ids.begin(), d.source_scene_ids.end());
  return d;
}

ClusterDistribution learn_distribution(std::span<const Scene> scenes,
                                       const std::set<std::string>& class_universe,
                                       double bin_width_deg, int cluster_index) {
  std::vector<const Scene*> ptrs;
  ptrs.reserve(scenes.size());
  for (const auto& s : scenes) ptrs.push_back(&s);
  return learn_distribution(std::span<const Scene* const>(ptrs), class_universe,
                            bin_width_deg, cluster_index);
}

std::string_view ood_reason_name(OodReason reason) {
  switch (reason) {
    case OodReason::kBelowMin: return "BelowMin";
    case OodReason::kAboveMax: return "AboveMax";
    case OodReason::kNovelOrientation: return "NovelOrientation";
  }
  return "Unknown";
}

OodVerdict is_ood(const Scene& scene, const ClusterDistribution& dist,
                  std::string_view class_label) {
  const ClassDistribution& cd = dist.at(class_label);
  const int n = scene.count(class_label);
  if (n < cd.min_count) return {true, OodReason::kBelowMin};
  if (n > cd.max_count) return {true, OodReason::kAboveMax};
  for (const auto& o : scene.objects) {
    if (o.class_label != class_label) continue;
    if (!cd.theta_bins.contains(orientation_bin(o.orientation_deg, dist.bin_width_deg))) {
      return {true, OodReason::kNovelOrientation};
    }
  }
  return {false, std::nullopt};
}

std::string_view mutation_op_name(MutationOp op) {
  switch (op) {
    case MutationOp::kInsert: return "insert";
    case MutationOp::kDelete: return "delete";
    case MutationOp::kRotate: return "rotate";
  }
  return "unknown";
}

std::optional<MutationOp> parse_mutation_op(std::string_view name) {
  if (name == "insert" || name == "insertion") return MutationOp::kInsert;
  if (name == "delete" || name == "deletion") return MutationOp::kDelete;
  if (name == "rotate" || name == "rotation") return MutationOp::kRotate;
  return std::nullopt;
}

int mutation_count(int count_in_image, const ClusterDistribution& dist,
                   std::string_view class_label, MutationOp op, int surplus_max, Rng& rng) {
  switch (op) {
    case MutationOp::kInsert: {
      const ClassDistribution& cd = dist.at(class_label);
      const int base = std::max(cd.max_count - count_in_image + 1, 1);
      const int surplus =
          surplus_max > 0 ? static_cast<int>(rng.uniform_int(0, surplus_max)) : 0;
      return base + surplus;
    }
    case MutationOp::kDelete:
      return count_in_image;
    case MutationOp::kRotate:
      return 1;
  }
  return 0;
}

std::optional<int> in_distribution_insert_count(int count_in_image,
                                                const ClusterDistribution& dist,
                                                std::string_view class_label, Rng& rng) {
  const ClassDistribution& cd = dist.at(class_label);
  const int lo = std::max(1, cd.min_count - count_in_image);
  const int hi = cd.max_count - count_in_image;
  if (hi < lo) return std::nullopt;
  return static_cast<int>(rng.uniform_int(lo, hi));
}

nlohmann::json distribution_to_json(const ClusterDistribution& d) {
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [label, cd] : d.per_class) {
    classes[label] = {{"min", cd.min_count},
                      {"max", cd.max_count},
                      {"theta_bins", std::vector<int>(cd.theta_bins.begin(), cd.theta_bins.end())}};
  }
  return {{"cluster", d.cluster_index},
          {"bin_width_deg", d.bin_width_deg},
          {"classes", classes},
          {"source_scene_ids", d.source_scene_ids}};
}

ClusterDistribution distribution_from_json(const nlohmann::json& j) {
  ClusterDistribution d;
  d.cluster_index = j.at("cluster").get<int>();
  d.bin_width_deg = j.value("bin_width_deg", 5.0);
  for (const auto& [label, c] : j.at("classes").items()) {
    ClassDistribution cd;
    cd.class_label = label;
    cd.min_count = c.at("min").get<int>();
    cd.max_count = c.at("max").get<int>();
    for (int b : c.at("theta_bins").get<std::vector<int>>()) cd.theta_bins.insert(b);
    d.per_class.emplace(label, std::move(cd));
  }
  if (j.contains("source_scene_ids")) {
    d.source_scene_ids = j.at("source_scene_ids").get<std::vector<std::string>>();
  }
  return d;
}

}  // namespace oodfair
