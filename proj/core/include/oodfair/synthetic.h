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

#ifndef OODFAIR_SYNTHETIC_H_
#define OODFAIR_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/mutation.h"
#include "oodfair/scene.h"

namespace oodfair {

// Inclusive instance-count range per class for one kind of street scene.
struct SceneMix {
  std::string name;
  std::map<std::string, std::pair<int, int>> counts;
  double weight = 1.0;
};

std::vector<SceneMix> default_scene_mixes();

struct SyntheticOptions {
  int scenes = 120;
  std::uint64_t seed = 0;
  std::vector<SceneMix> mixes = default_scene_mixes();
  // Chance that a scene carries one annotated-but-unboxed object.
  double hidden_object_probability = 0.1;
  // Orientation noise around the canonical heading, in degrees.
  double orientation_jitter_deg = 4.0;
  RelativeSizeTable sizes = RelativeSizeTable::defaults();
  InsertionConfig shapes = InsertionConfig::defaults();

  static SyntheticOptions from_json(const nlohmann::json& j);
};

// Road scenes viewed from a dash camera: a ground band below a horizon,
// objects standing on it with heights growing linearly towards the viewer,
// and traffic lights hanging above the road.
Dataset generate_synthetic(const SyntheticOptions& options);

}  // namespace oodfair

#endif  // OODFAIR_SYNTHETIC_H_
