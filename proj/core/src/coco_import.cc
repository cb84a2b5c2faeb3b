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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "oodfair/errors.h"
#include "oodfair/scene_io.h"

namespace oodfair {

using nlohmann::json;

namespace {

std::string stem_of(const std::string& file_name) {
  const auto slash = file_name.find_last_of('/');
  std::string base = slash == std::string::npos ? file_name : file_name.substr(slash + 1);
  const auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

// Rounds a float COCO box to whole pixels and clips it to the canvas.
// Returns false when nothing of the box survives.
bool to_pixel_box(const json& bbox, int width, int height, Box& out) {
  if (!bbox.is_array() || bbox.size() != 4) return false;
  const double x0 = std::floor(bbox[0].get<double>());
  const double y0 = std::floor(bbox[1].get<double>());
  const double x1 = std::ceil(bbox[0].get<double>() + bbox[2].get<double>());
  const double y1 = std::ceil(bbox[1].get<double>() + bbox[3].get<double>());
  const int cx0 = std::clamp(static_cast<int>(x0), 0, width);
  const int cy0 = std::clamp(static_cast<int>(y0), 0, height);
  const int cx1 = std::clamp(static_cast<int>(x1), 0, width);
  const int cy1 = std::clamp(static_cast<int>(y1), 0, height);
  if (cx1 <= cx0 || cy1 <= cy0) return false;
  out = {cx0, cy0, cx1 - cx0, cy1 - cy0};
  return true;
}

}  // namespace

Dataset import_coco(const json& coco, const CocoImportOptions& options) {
  if (!coco.is_object() || !coco.contains("images") || !coco.contains("annotations") ||
      !coco.contains("categories")) {
    throw MalformedScene("coco", "expected 'images', 'annotations' and 'categories'");
  }
  std::map<long long, std::string> category_names;
  for (const auto& c : coco.at("categories")) {
    category_names[c.at("id").get<long long>()] = c.at("name").get<std::string>();
  }

  std::map<long long, Scene> by_image;
  for (const auto& img : coco.at("images")) {
    Scene s;
    const long long id = img.at("id").get<long long>();
    s.scene_id = img.contains("file_name") ? stem_of(img.at("file_name").get<std::string>())
                                           : "coco_" + std::to_string(id);
    s.width = img.at("width").get<int>();
    s.height = img.at("height").get<int>();
    by_image.emplace(id, std::move(s));
  }

  std::map<long long, int> next_instance;
  for (const auto& a : coco.at("annotations")) {
    auto it = by_image.find(a.at("image_id").get<long long>());
    if (it == by_image.end()) continue;
    Scene& s = it->second;
    auto cat = category_names.find(a.at("category_id").get<long long>());
    if (cat == category_names.end()) continue;
    Box box;
    if (!to_pixel_box(a.at("bbox"), s.width, s.height, box)) continue;
    if (options.ground_categories.contains(cat->second)) {
      s.ground_regions.push_back(box);
      continue;
    }
    ObjectInstance o;
    o.instance_id = a.contains("id") ? "ann_" + std::to_string(a.at("id").get<long long>())
                                     : "obj_" + std::to_string(next_instance[it->first]++);
    o.class_label = cat->second;
    o.bbox = box;
    s.objects.push_back(std::move(o));
  }

  std::vector<Scene> scenes;
  for (auto& [id, s] : by_image) {
    // depth_rank = 1 + rank of bottom edge; ties share a rank.
    std::vector<int> bottoms;
    for (const auto& o : s.objects) bottoms.push_back(o.bbox.bottom());
    std::sort(bottoms.begin(), bottoms.end());
    bottoms.erase(std::unique(bottoms.begin(), bottoms.end()), bottoms.end());
    for (auto& o : s.objects) {
      o.depth_rank = 1 + static_cast<int>(std::lower_bound(bottoms.begin(), bottoms.end(),
                                                           o.bbox.bottom()) -
                                          bottoms.begin());
    }
    s.gt_counts = s.instance_counts();
    scenes.push_back(std::move(s));
  }
  return make_dataset(std::move(scenes));
}

}  // namespace oodfair
