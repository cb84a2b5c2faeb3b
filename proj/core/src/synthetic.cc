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

#include "oodfair/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "oodfair/errors.h"
#include "oodfair/rng.h"

namespace oodfair {

std::vector<SceneMix> default_scene_mixes() {
  return {
      {"urban",
       {{"person", {1, 5}}, {"car", {1, 4}}, {"traffic light", {0, 2}}, {"bicycle", {0, 1}},
        {"motorcycle", {0, 1}}},
       1.0},
      {"highway", {{"car", {3, 7}}, {"truck", {1, 3}}, {"motorcycle", {0, 2}}}, 1.0},
      {"residential",
       {{"person", {0, 3}}, {"car", {1, 3}}, {"dog", {0, 1}}, {"bicycle", {0, 2}}},
       1.0},
      {"plaza", {{"person", {3, 8}}, {"car", {0, 2}}, {"truck", {0, 1}}, {"bus", {0, 1}}}, 1.0},
  };
}

SyntheticOptions SyntheticOptions::from_json(const nlohmann::json& j) {
  SyntheticOptions o;
  o.scenes = j.value("scenes", o.scenes);
  o.seed = j.value("seed", o.seed);
  o.hidden_object_probability = j.value("hidden_object_probability", o.hidden_object_probability);
  o.orientation_jitter_deg = j.value("orientation_jitter_deg", o.orientation_jitter_deg);
  if (j.contains("mixes")) {
    o.mixes.clear();
    for (const auto& m : j.at("mixes")) {
      SceneMix mix;
      mix.name = m.at("name").get<std::string>();
      mix.weight = m.value("weight", 1.0);
      for (const auto& [label, range] : m.at("counts").items()) {
        mix.counts[label] = {range.at(0).get<int>(), range.at(1).get<int>()};
      }
      o.mixes.push_back(std::move(mix));
    }
  }
  if (o.scenes < 1) throw Error(ErrorCode::kConfig, "synthetic corpus needs at least one scene");
  if (o.mixes.empty()) throw Error(ErrorCode::kConfig, "synthetic corpus needs a scene mix");
  return o;
}

namespace {

struct CanvasSize {
  int w, h;
};
constexpr CanvasSize kCanvases[] = {{320, 240}, {400, 240}, {480, 270}};

double canonical_heading(const std::string& label, Rng& rng) {
  if (label == "car" || label == "truck" || label == "bus" || label == "motorcycle" ||
      label == "bicycle") {
    return rng.bernoulli(0.5) ? 0.0 : 180.0;
  }
  if (label == "dog" || label == "cat") return rng.bernoulli(0.5) ? 90.0 : 270.0;
  return 0.0;
}

std::optional<Scene> try_scene(const std::string& id, const SceneMix& mix,
                               const SyntheticOptions& opt, Rng& rng) {
  const CanvasSize canvas = kCanvases[rng.index(std::size(kCanvases))];
  Scene s;
  s.scene_id = id;
  s.width = canvas.w;
  s.height = canvas.h;
  const int horizon = static_cast<int>(std::lround(canvas.h * (0.35 + 0.15 * rng.uniform())));
  s.ground_regions.push_back({0, horizon, canvas.w, canvas.h - horizon});
  // Reference (car) height grows linearly from 0 at the horizon.
  const double car_at_bottom = canvas.h * (0.28 + 0.1 * rng.uniform());
  const double slope = car_at_bottom / (canvas.h - horizon);

  int serial = 0;
  for (const auto& [label, range] : mix.counts) {
    const int n = static_cast<int>(rng.uniform_int(range.first, range.second));
    for (int i = 0; i < n; ++i) {
      for (int attempt = 0; attempt < 30; ++attempt) {
        Box box;
        if (label == "traffic light") {
          const int h = static_cast<int>(rng.uniform_int(14, 24));
          const int w = std::max(3, static_cast<int>(std::lround(h * opt.shapes.aspect_ratio(label))));
          const int bottom = static_cast<int>(rng.uniform_int(h + 2, std::max(h + 2, horizon - 4)));
          box = {static_cast<int>(rng.uniform_int(0, canvas.w - w)), bottom - h, w, h};
        } else {
          const double ratio = opt.sizes.has(label) ? opt.sizes.ratio(label) : 1.0;
          const int bottom = static_cast<int>(rng.uniform_int(horizon + 10, canvas.h));
          const int h = static_cast<int>(std::lround(ratio * slope * (bottom - horizon)));
          if (h < 4 || h > bottom) continue;
          const int w = std::max(2, static_cast<int>(std::lround(h * opt.shapes.aspect_ratio(label))));
          if (w > canvas.w) continue;
          box = {static_cast<int>(rng.uniform_int(0, canvas.w - w)), bottom - h, w, h};
        }
        const bool crowded = std::any_of(s.objects.begin(), s.objects.end(), [&](const auto& o) {
          return overlap_over_smaller(o.bbox, box) > 0.5;
        });
        if (crowded) continue;
        ObjectInstance o;
        char buf[32];
        std::snprintf(buf, sizeof buf, "obj_%02d", serial++);
        o.instance_id = buf;
        o.class_label = label;
        o.bbox = box;
        o.orientation_deg = normalize_degrees(canonical_heading(label, rng) +
                                              (2.0 * rng.uniform() - 1.0) * opt.orientation_jitter_deg);
        s.objects.push_back(std::move(o));
        break;
      }
    }
  }

  const auto sized = std::count_if(s.objects.begin(), s.objects.end(),
                                   [&](const auto& o) { return opt.sizes.has(o.class_label); });
  if (sized < 2) return std::nullopt;

  std::vector<int> bottoms;
  for (const auto& o : s.objects) bottoms.push_back(o.bbox.bottom());
  std::sort(bottoms.begin(), bottoms.end());
  bottoms.erase(std::unique(bottoms.begin(), bottoms.end()), bottoms.end());
  for (auto& o : s.objects) {
    o.depth_rank = 1 + static_cast<int>(std::lower_bound(bottoms.begin(), bottoms.end(),
                                                         o.bbox.bottom()) - bottoms.begin());
  }
  s.gt_counts = s.instance_counts();
  if (!s.objects.empty() && rng.bernoulli(opt.hidden_object_probability)) {
    ++s.gt_counts[s.objects[rng.index(s.objects.size())].class_label];
  }
  return s;
}

}  // namespace

Dataset generate_synthetic(const SyntheticOptions& opt) {
  if (opt.scenes < 1 || opt.mixes.empty()) {
    throw Error(ErrorCode::kConfig, "synthetic corpus needs scenes and a scene mix");
  }
  double total_weight = 0.0;
  for (const auto& m : opt.mixes) total_weight += m.weight;

  std::vector<Scene> scenes;
  for (int i = 0; i < opt.scenes; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "syn_%04d", i);
    Rng rng(derive_seed(opt.seed, id));
    double pick = rng.uniform() * total_weight;
    const SceneMix* mix = &opt.mixes.back();
    for (const auto& m : opt.mixes) {
      if (pick < m.weight) {
        mix = &m;
        break;
      }
      pick -= m.weight;
    }
    std::optional<Scene> s;
    for (int attempt = 0; attempt < 100 && !s; ++attempt) s = try_scene(id, *mix, opt, rng);
    if (!s) throw Error(ErrorCode::kConfig, std::string("scene mix '") + mix->name +
                                                "' cannot produce two sized objects");
    validate_scene(*s, "synthetic");
    scenes.push_back(std::move(*s));
  }
  return make_dataset(std::move(scenes));
}

}  // namespace oodfair
