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

#ifndef OODFAIR_SCENE_H_
#define OODFAIR_SCENE_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oodfair {

// Axis-aligned pixel rectangle. Covers columns [x, x + w) and rows [y, y + h);
// y grows downward, so bottom() is one past the last covered row.
struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  long long area() const { return static_cast<long long>(w) * h; }
  bool contains(double px, double py) const {
    return px >= x && px < right() && py >= y && py < bottom();
  }

  bool operator==(const Box&) const = default;
};

long long intersection_area(const Box& a, const Box& b);

// Intersection divided by the smaller of the two areas; 0 for disjoint boxes.
double overlap_over_smaller(const Box& a, const Box& b);

struct ObjectInstance {
  std::string instance_id;
  std::string class_label;
  Box bbox;
  double orientation_deg = 0.0;  // [0, 360)
  int depth_rank = 0;            // larger = nearer to the observer

  bool operator==(const ObjectInstance&) const = default;
};

using ClassCounts = std::map<std::string, int>;

struct Scene {
  std::string scene_id;
  int width = 0;
  int height = 0;
  std::vector<Box> ground_regions;
  std::vector<ObjectInstance> objects;
  ClassCounts gt_counts;  // dataset ground truth; may exceed visible instances

  int count(std::string_view label) const;
  ClassCounts instance_counts() const;

  bool operator==(const Scene&) const = default;
};

struct Dataset {
  std::vector<Scene> scenes;
  std::set<std::string> class_universe;

  const Scene* find(std::string_view scene_id) const;
  // class_universe in its canonical (sorted) order.
  std::vector<std::string> ordered_classes() const;

  bool operator==(const Dataset&) const = default;
};

// Maps any finite angle into [0, 360).
double normalize_degrees(double deg);

// Checks every Scene invariant; throws MalformedScene naming `source`.
void validate_scene(const Scene& scene, std::string_view source);

// Builds a Dataset from scenes, validating each scene, scene-id uniqueness
// and non-emptiness. The class universe is the union of instance labels and
// ground-truth keys.
Dataset make_dataset(std::vector<Scene> scenes);

// Component i is the number of instances of universe[i] in the scene.
std::vector<int> class_count_vector(const Scene& scene,
                                    std::span<const std::string> universe);

}  // namespace oodfair

#endif  // OODFAIR_SCENE_H_
