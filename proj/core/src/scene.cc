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

#include "oodfair/scene.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "oodfair/errors.h"

namespace oodfair {

long long intersection_area(const Box& a, const Box& b) {
  const long long w = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const long long h = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

double overlap_over_smaller(const Box& a, const Box& b) {
  const long long smaller = std::min(a.area(), b.area());
  if (smaller <= 0) return 0.0;
  return static_cast<double>(intersection_area(a, b)) / static_cast<double>(smaller);
}

int Scene::count(std::string_view label) const {
  return static_cast<int>(std::count_if(
      objects.begin(), objects.end(),
      [&](const ObjectInstance& o) { return o.class_label == label; }));
}

ClassCounts Scene::instance_counts() const {
  ClassCounts counts;
  for (const auto& o : objects) ++counts[o.class_label];
  return counts;
}

const Scene* Dataset::find(std::string_view scene_id) const {
  for (const auto& s : scenes) {
    if (s.scene_id == scene_id) return &s;
  }
  return nullptr;
}

std::vector<std::string> Dataset::ordered_classes() const {
  return {class_universe.begin(), class_universe.end()};
}

double normalize_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0) r += 360.0;
  if (r >= 360.0) r = 0.0;  // fmod rounding on tiny negatives
  return r;
}

namespace {

bool inside_canvas(const Box& b, int width, int height) {
  return b.x >= 0 && b.y >= 0 && b.right() <= width && b.bottom() <= height;
}

std::string box_str(const Box& b) {
  return "(" + std::to_string(b.x) + "," + std::to_string(b.y) + "," +
         std::to_string(b.w) + "," + std::to_string(b.h) + ")";
}

}  // namespace

void validate_scene(const Scene& scene, std::string_view source) {
  const std::string src(source);
  auto fail = [&](const std::string& reason) { throw MalformedScene(src, reason); };

  if (scene.scene_id.empty()) fail("empty scene_id");
  if (scene.width <= 0 || scene.height <= 0) fail("canvas must be positive");

  for (const auto& g : scene.ground_regions) {
    if (g.w <= 0 || g.h <= 0) fail("degenerate ground region " + box_str(g));
    if (!inside_canvas(g, scene.width, scene.height)) {
      fail("ground region " + box_str(g) + " outside canvas");
    }
  }

  std::unordered_set<std::string> ids;
  for (const auto& o : scene.objects) {
    if (o.instance_id.empty()) fail("object with empty instance_id");
    if (!ids.insert(o.instance_id).second) fail("duplicate instance_id " + o.instance_id);
    if (o.class_label.empty()) fail("object " + o.instance_id + " has empty class");
    if (o.bbox.w <= 0 || o.bbox.h <= 0) {
      fail("object " + o.instance_id + " has non-positive size");
    }
    if (!inside_canvas(o.bbox, scene.width, scene.height)) {
      fail("object " + o.instance_id + " bbox " + box_str(o.bbox) + " extends past canvas");
    }
    if (!std::isfinite(o.orientation_deg) || o.orientation_deg < 0.0 ||
        o.orientation_deg >= 360.0) {
      fail("object " + o.instance_id + " orientation outside [0, 360)");
    }
  }

  for (const auto& [label, n] : scene.gt_counts) {
    if (n < 0) fail("negative gt_count for " + label);
  }
  for (const auto& [label, n] : scene.instance_counts()) {
    auto it = scene.gt_counts.find(label);
    if (it == scene.gt_counts.end()) fail("missing gt_count for " + label);
    if (it->second < n) {
      fail("gt_count for " + label + " smaller than instance count");
    }
  }
}

Dataset make_dataset(std::vector<Scene> scenes) {
  if (scenes.empty()) throw Error(ErrorCode::kEmptyDataset, "no scenes");
  Dataset d;
  std::unordered_set<std::string> seen;
  for (const auto& s : scenes) {
    validate_scene(s, s.scene_id);
    if (!seen.insert(s.scene_id).second) {
      throw Error(ErrorCode::kDuplicateSceneId, s.scene_id);
    }
    for (const auto& o : s.objects) d.class_universe.insert(o.class_label);
    for (const auto& [label, n] : s.gt_counts) d.class_universe.insert(label);
  }
  d.scenes = std::move(scenes);
  return d;
}

std::vector<int> class_count_vector(const Scene& scene,
                                    std::span<const std::string> universe) {
  std::vector<int> v(universe.size(), 0);
  for (const auto& o : scene.objects) {
    auto it = std::find(universe.begin(), universe.end(), o.class_label);
    if (it != universe.end()) ++v[static_cast<std::size_t>(it - universe.begin())];
  }
  return v;
}

}  // namespace oodfair
