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

#include "oodfair/mutation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oodfair/errors.h"
#include "oodfair/rng.h"

namespace oodfair {

RelativeSizeTable RelativeSizeTable::defaults() {
  RelativeSizeTable t;
  t.ratios = {{"car", 1.0},        {"person", 1.2}, {"truck", 1.6}, {"motorcycle", 0.9},
              {"dog", 0.5},        {"cat", 0.35},   {"bird", 0.2},  {"bus", 1.9},
              {"bicycle", 0.9}};
  return t;
}

bool RelativeSizeTable::has(std::string_view label) const {
  return ratios.contains(std::string(label));
}

double RelativeSizeTable::ratio(std::string_view label) const {
  auto it = ratios.find(std::string(label));
  if (it == ratios.end()) {
    throw Error(ErrorCode::kConfig, "no relative size for '" + std::string(label) + "'");
  }
  return it->second;
}

void RelativeSizeTable::validate() const {
  auto ref = ratios.find(reference_class);
  if (ref == ratios.end() || ref->second != 1.0) {
    throw Error(ErrorCode::kConfig, "reference class '" + reference_class + "' must have ratio 1");
  }
  for (const auto& [label, r] : ratios) {
    if (!(r > 0.0)) throw Error(ErrorCode::kConfig, "ratio for '" + label + "' must be > 0");
  }
}

nlohmann::json RelativeSizeTable::to_json() const {
  return {{"reference_class", reference_class}, {"ratios", ratios}};
}

RelativeSizeTable RelativeSizeTable::from_json(const nlohmann::json& j) {
  RelativeSizeTable t;
  t.reference_class = j.value("reference_class", std::string("car"));
  t.ratios = j.at("ratios").get<std::map<std::string, double>>();
  t.validate();
  return t;
}

InsertionConfig InsertionConfig::defaults() {
  InsertionConfig c;
  c.aspect_ratios = {{"car", 1.8},        {"person", 0.4}, {"truck", 1.6}, {"motorcycle", 1.1},
                     {"dog", 1.3},        {"cat", 1.2},    {"bird", 1.0},  {"bus", 2.0},
                     {"bicycle", 1.2},    {"traffic light", 0.35}};
  return c;
}

double InsertionConfig::aspect_ratio(std::string_view label) const {
  auto it = aspect_ratios.find(std::string(label));
  return it == aspect_ratios.end() ? default_aspect_ratio : it->second;
}

ScalingModel compute_scaling_factor(const Scene& scene, const RelativeSizeTable& table) {
  std::vector<std::pair<double, double>> samples;  // (bottom_y, reference height)
  for (const auto& o : scene.objects) {
    if (!table.has(o.class_label)) continue;
    samples.emplace_back(o.bbox.bottom(), o.bbox.h / table.ratio(o.class_label));
  }
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInsufficientReferences,
                scene.scene_id + ": fewer than two sized objects");
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : samples) {
    mx += x;
    my += y;
  }
  mx /= samples.size();
  my /= samples.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : samples) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) {
    throw Error(ErrorCode::kInsufficientReferences,
                scene.scene_id + ": all sized objects share one bottom row");
  }
  ScalingModel m;
  m.slope = sxy / sxx;
  m.mid_y = scene.height / 2.0;
  m.height_at_mid = my + m.slope * (m.mid_y - mx);
  return m;
}

std::string_view skip_reason_name(SkipReason reason) {
  switch (reason) {
    case SkipReason::kNoFeasiblePlacement: return "NoFeasiblePlacement";
    case SkipReason::kInsufficientReferences: return "InsufficientReferences";
    case SkipReason::kNothingToDelete: return "NothingToDelete";
    case SkipReason::kNoUnobstructedInstance: return "NoUnobstructedInstance";
    case SkipReason::kNoNovelOrientation: return "NoNovelOrientation";
    case SkipReason::kNoInDistributionVariant: return "NoInDistributionVariant";
  }
  return "Unknown";
}

namespace {

MutationResult skipped(MutationSpec spec, SkipReason reason) {
  MutationResult r;
  r.spec = std::move(spec);
  r.skip = reason;
  return r;
}

bool bottom_row_on_ground(const SegmentationGrid& grid, const Box& box) {
  const int row = grid.row_of_pixel(box.bottom() - 1);
  CellRange cols = grid.col_range(box.x, box.right());
  if (cols.empty()) {
    const CellRange centre = grid.col_range(box.x + box.w / 2, box.x + box.w / 2 + 1);
    if (centre.empty()) return false;
    cols = centre;
  }
  for (int c = cols.begin; c < cols.end; ++c) {
    if (grid.owner(c, row) != SegmentationGrid::kGround) return false;
  }
  return true;
}

// Farther objects (smaller bottom edge) must rank below nearer ones. Existing
// ranks are never changed: the new object goes directly in front of the
// nearest farther-or-level object, but never above a nearer one (the existing
// object wins ties because it comes first).
int depth_for_insert(const std::vector<ObjectInstance>& objects, int bottom) {
  std::optional<int> behind_max;
  std::optional<int> front_min;
  for (const auto& o : objects) {
    if (o.bbox.bottom() <= bottom) {
      behind_max = std::max(behind_max.value_or(std::numeric_limits<int>::min()), o.depth_rank);
    } else {
      front_min = std::min(front_min.value_or(std::numeric_limits<int>::max()), o.depth_rank);
    }
  }
  int rank = behind_max ? *behind_max + 1 : (front_min ? *front_min - 1 : 1);
  if (front_min && rank > *front_min) rank = *front_min;
  return rank;
}

std::string fresh_instance_id(const Scene& scene, const std::string& label) {
  std::string base = label;
  std::replace(base.begin(), base.end(), ' ', '_');
  for (int k = 0;; ++k) {
    std::string id = base + "_ins_" + std::to_string(k);
    const bool taken = std::any_of(scene.objects.begin(), scene.objects.end(),
                                   [&](const ObjectInstance& o) { return o.instance_id == id; });
    if (!taken) return id;
  }
}

double orientation_in_bin(int bin, double width, Rng& rng) {
  const double lo = bin * width;
  double deg = lo + rng.uniform() * width;
  if (deg >= 360.0 || orientation_bin(deg, width) != bin) {
    deg = std::min(lo + width / 2.0, (lo + 360.0) / 2.0);
  }
  return deg;
}

}  // namespace

MutationResult insert_objects(const Scene& scene, const ClusterDistribution& dist,
                              const std::string& class_label, int count,
                              const RelativeSizeTable& table, const InsertionConfig& config,
                              std::uint64_t seed) {
  MutationSpec spec{MutationOp::kInsert, class_label, count, seed, scene.scene_id, 0};
  const double ratio = table.ratio(class_label);
  const ClassDistribution& cd = dist.at(class_label);

  ScalingModel model;
  try {
    model = compute_scaling_factor(scene, table);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientReferences) throw;
    return skipped(spec, SkipReason::kInsufficientReferences);
  }
  if (scene.ground_regions.empty()) return skipped(spec, SkipReason::kNoFeasiblePlacement);

  int ground_top = scene.height;
  int ground_bottom = 0;
  for (const auto& g : scene.ground_regions) {
    ground_top = std::min(ground_top, g.y);
    ground_bottom = std::max(ground_bottom, g.bottom());
  }

  SegmentationGrid grid = derive_segmentation(scene, config.resolution);
  Scene mutant = scene;
  std::vector<int> theta(cd.theta_bins.begin(), cd.theta_bins.end());
  Rng rng(seed);
  MutationResult result;

  for (int placed = 0; placed < count; ++placed) {
    bool ok = false;
    for (int attempt = 0; attempt < config.max_attempts && !ok; ++attempt) {
      // Candidate: bottom edge row and horizontal centre.
      const int bottom = static_cast<int>(rng.uniform_int(ground_top + 1, ground_bottom));
      const double centre_x = rng.uniform() * scene.width;
      const double height = model.reference_height(bottom) * ratio;
      const int h = static_cast<int>(std::lround(height));
      if (h < config.min_height_px) continue;
      const int w = std::max(1, static_cast<int>(std::lround(h * config.aspect_ratio(class_label))));
      const Box box{static_cast<int>(std::lround(centre_x - w / 2.0)), bottom - h, w, h};
      if (box.x < 0 || box.y < 0 || box.right() > scene.width || box.bottom() > scene.height) {
        continue;
      }
      if (!bottom_row_on_ground(grid, box)) continue;
      const bool obstructs = std::any_of(
          mutant.objects.begin(), mutant.objects.end(), [&](const ObjectInstance& o) {
            return overlap_over_smaller(o.bbox, box) > config.occlusion_threshold;
          });
      if (obstructs) continue;

      ObjectInstance inst;
      inst.instance_id = fresh_instance_id(mutant, class_label);
      inst.class_label = class_label;
      inst.bbox = box;
      inst.depth_rank = depth_for_insert(mutant.objects, box.bottom());
      inst.orientation_deg =
          theta.empty() ? 0.0
                        : orientation_in_bin(theta[rng.index(theta.size())], dist.bin_width_deg, rng);
      grid.paint(box, static_cast<std::int32_t>(mutant.objects.size()), class_label);
      result.touched_ids.push_back(inst.instance_id);
      mutant.objects.push_back(std::move(inst));
      ok = true;
    }
    if (!ok) return skipped(spec, SkipReason::kNoFeasiblePlacement);
  }

  mutant.gt_counts[class_label] += count;
  result.spec = spec;
  result.ood = is_ood(mutant, dist, class_label);
  result.mutant = std::move(mutant);
  return result;
}

MutationResult delete_class(const Scene& scene, const std::string& class_label,
                            const ClusterDistribution* dist) {
  const int n = scene.count(class_label);
  MutationSpec spec{MutationOp::kDelete, class_label, n, 0, scene.scene_id, 0};
  if (n == 0) return skipped(spec, SkipReason::kNothingToDelete);

  MutationResult result;
  result.spec = spec;
  Scene mutant = scene;
  mutant.objects.clear();
  for (const auto& o : scene.objects) {
    if (o.class_label == class_label) {
      result.touched_ids.push_back(o.instance_id);
    } else {
      mutant.objects.push_back(o);
    }
  }
  mutant.gt_counts[class_label] = 0;
  if (dist != nullptr) result.ood = is_ood(mutant, *dist, class_label);
  result.mutant = std::move(mutant);
  return result;
}

MutationResult rotate_object(const Scene& scene, const ClusterDistribution& dist,
                             const std::string& class_label, std::uint64_t seed,
                             double occlusion_threshold) {
  MutationSpec spec{MutationOp::kRotate, class_label, 1, seed, scene.scene_id, 0};
  const ClassDistribution& cd = dist.at(class_label);

  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    if (o.class_label != class_label) continue;
    const bool blocked = std::any_of(
        scene.objects.begin(), scene.objects.end(), [&](const ObjectInstance& other) {
          return other.depth_rank > o.depth_rank &&
                 overlap_over_smaller(other.bbox, o.bbox) > occlusion_threshold;
        });
    if (!blocked) free.push_back(i);
  }
  if (free.empty()) return skipped(spec, SkipReason::kNoUnobstructedInstance);

  std::vector<int> novel;
  for (int b = 0; b < dist.bin_count(); ++b) {
    if (!cd.theta_bins.contains(b)) novel.push_back(b);
  }
  if (novel.empty()) return skipped(spec, SkipReason::kNoNovelOrientation);

  Rng rng(seed);
  const std::size_t target = free[rng.index(free.size())];
  const int bin = novel[rng.index(novel.size())];

  MutationResult result;
  result.spec = spec;
  Scene mutant = scene;
  mutant.objects[target].orientation_deg = orientation_in_bin(bin, dist.bin_width_deg, rng);
  result.touched_ids.push_back(mutant.objects[target].instance_id);
  result.ood = is_ood(mutant, dist, class_label);
  result.mutant = std::move(mutant);
  return result;
}

std::map<MutationOp, std::vector<std::string>> GenerationConfig::default_classes() {
  const std::vector<std::string> base = {"person", "car", "motorcycle", "truck"};
  std::vector<std::string> insert = base;
  insert.insert(insert.end(), {"bird", "cat", "dog"});
  return {{MutationOp::kInsert, insert}, {MutationOp::kDelete, base}, {MutationOp::kRotate, base}};
}

std::string mutant_id(const MutationSpec& spec, DistributionMode mode) {
  std::string label = spec.target_class;
  std::replace(label.begin(), label.end(), ' ', '_');
  return spec.source_scene_id + "__" + (mode == DistributionMode::kId ? "id-" : "") +
         std::string(mutation_op_name(spec.op)) + "_" + label + "_" + std::to_string(spec.iteration);
}

std::vector<MutationResult> generate_ood_set(const Dataset& dataset,
                                             const ClusterAssignment& assignment,
                                             const std::vector<ClusterDistribution>& dists,
                                             const GenerationConfig& config) {
  std::vector<MutationResult> out;
  for (int c = 0; c < assignment.k; ++c) {
    const ClusterDistribution& dist = dists.at(static_cast<std::size_t>(c));
    std::vector<const Scene*> members;
    for (const auto& s : dataset.scenes) {
      auto it = assignment.assignments.find(s.scene_id);
      if (it != assignment.assignments.end() && it->second == c) members.push_back(&s);
    }
    for (MutationOp op : config.ops) {
      auto cls = config.classes.find(op);
      if (cls == config.classes.end()) continue;
      const int iterations = op == MutationOp::kDelete ? 1 : std::max(1, config.iterations);
      for (const std::string& label : cls->second) {
        for (const Scene* scene : members) {
          for (int iter = 0; iter < iterations; ++iter) {
            const std::uint64_t seed = derive_seed(
                derive_seed(derive_seed(config.seed, scene->scene_id),
                            std::string(mutation_op_name(op)) + "/" + label),
                "iteration/" + std::to_string(iter));
            MutationResult r;
            const int present = scene->count(label);
            switch (op) {
              case MutationOp::kInsert: {
                Rng count_rng(derive_seed(seed, "count"));
                std::optional<int> n;
                if (config.mode == DistributionMode::kOod) {
                  n = mutation_count(present, dist, label, op, config.surplus_max, count_rng);
                } else {
                  n = in_distribution_insert_count(present, dist, label, count_rng);
                }
                if (!n) {
                  r = skipped({op, label, 0, seed, scene->scene_id, 0},
                              SkipReason::kNoInDistributionVariant);
                } else {
                  r = insert_objects(*scene, dist, label, *n, config.sizes, config.insertion, seed);
                }
                break;
              }
              case MutationOp::kDelete:
                r = delete_class(*scene, label, &dist);
                break;
              case MutationOp::kRotate:
                r = rotate_object(*scene, dist, label, seed, config.insertion.occlusion_threshold);
                break;
            }
            r.spec.iteration = iter;
            if (config.mode == DistributionMode::kId && !r.skipped() && r.ood.ood) {
              r = skipped(r.spec, SkipReason::kNoInDistributionVariant);
            }
            if (r.mutant) r.mutant->scene_id = mutant_id(r.spec, config.mode);
            out.push_back(std::move(r));
          }
        }
      }
    }
  }
  return out;
}

nlohmann::json provenance_json(const MutationResult& r) {
  nlohmann::json j = {{"source", r.spec.source_scene_id},
                      {"op", mutation_op_name(r.spec.op)},
                      {"class", r.spec.target_class},
                      {"count", r.spec.count},
                      {"seed", r.spec.seed},
                      {"iteration", r.spec.iteration},
                      {"ood", r.ood.ood},
                      {"reason", r.ood.reason ? std::string(ood_reason_name(*r.ood.reason))
                                              : std::string("InDistribution")},
                      {"touched", r.touched_ids}};
  if (r.skip) j["skipped"] = skip_reason_name(*r.skip);
  if (r.mutant) j["mutant"] = r.mutant->scene_id;
  return j;
}

}  // namespace oodfair
