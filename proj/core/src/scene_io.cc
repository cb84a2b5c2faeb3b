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

#include "oodfair/scene_io.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "oodfair/errors.h"

namespace oodfair {

using nlohmann::json;

namespace {

json box_to_json(const Box& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

const json& require(const json& j, const char* key, std::string_view src) {
  if (!j.is_object() || !j.contains(key)) {
    throw MalformedScene(std::string(src), std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

int require_int(const json& j, const char* key, std::string_view src) {
  const json& v = require(j, key, src);
  if (!v.is_number_integer()) {
    throw MalformedScene(std::string(src), std::string("'") + key + "' must be an integer");
  }
  return v.get<int>();
}

std::string require_string(const json& j, const char* key, std::string_view src) {
  const json& v = require(j, key, src);
  if (!v.is_string()) {
    throw MalformedScene(std::string(src), std::string("'") + key + "' must be a string");
  }
  return v.get<std::string>();
}

Box box_from_json(const json& j, std::string_view src) {
  return {require_int(j, "x", src), require_int(j, "y", src), require_int(j, "w", src),
          require_int(j, "h", src)};
}

}  // namespace

json scene_to_json(const Scene& s) {
  json grounds = json::array();
  for (const auto& g : s.ground_regions) grounds.push_back(box_to_json(g));
  json objects = json::array();
  for (const auto& o : s.objects) {
    objects.push_back({{"instance_id", o.instance_id},
                       {"class", o.class_label},
                       {"bbox", box_to_json(o.bbox)},
                       {"orientation_deg", o.orientation_deg},
                       {"depth_rank", o.depth_rank}});
  }
  json gt = json::object();
  for (const auto& [label, n] : s.gt_counts) gt[label] = n;
  return {{"scene_id", s.scene_id},
          {"canvas", {{"width", s.width}, {"height", s.height}}},
          {"ground_regions", grounds},
          {"objects", objects},
          {"gt_counts", gt}};
}

Scene scene_from_json(const json& j, std::string_view src) {
  if (!j.is_object()) throw MalformedScene(std::string(src), "scene must be a JSON object");
  Scene s;
  s.scene_id = require_string(j, "scene_id", src);
  const json& canvas = require(j, "canvas", src);
  s.width = require_int(canvas, "width", src);
  s.height = require_int(canvas, "height", src);

  if (j.contains("ground_regions")) {
    const json& g = j.at("ground_regions");
    if (!g.is_array()) throw MalformedScene(std::string(src), "'ground_regions' must be an array");
    for (const auto& r : g) s.ground_regions.push_back(box_from_json(r, src));
  }
  const json& objs = require(j, "objects", src);
  if (!objs.is_array()) throw MalformedScene(std::string(src), "'objects' must be an array");
  for (const auto& o : objs) {
    ObjectInstance inst;
    inst.instance_id = require_string(o, "instance_id", src);
    inst.class_label = require_string(o, "class", src);
    inst.bbox = box_from_json(require(o, "bbox", src), src);
    if (o.contains("orientation_deg")) {
      if (!o.at("orientation_deg").is_number()) {
        throw MalformedScene(std::string(src), "'orientation_deg' must be a number");
      }
      inst.orientation_deg = o.at("orientation_deg").get<double>();
    }
    if (o.contains("depth_rank")) inst.depth_rank = require_int(o, "depth_rank", src);
    s.objects.push_back(std::move(inst));
  }
  if (j.contains("gt_counts")) {
    const json& gt = j.at("gt_counts");
    if (!gt.is_object()) throw MalformedScene(std::string(src), "'gt_counts' must be an object");
    for (const auto& [label, n] : gt.items()) {
      if (!n.is_number_integer()) {
        throw MalformedScene(std::string(src), "gt_counts['" + label + "'] must be an integer");
      }
      s.gt_counts[label] = n.get<int>();
    }
  }
  validate_scene(s, src);
  return s;
}

std::string canonical_json(const Scene& scene) { return scene_to_json(scene).dump(); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  static std::atomic<unsigned long long> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(tid) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Scene read_scene_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw MalformedScene(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return scene_from_json(j, path.string());
}

void write_scene_file(const std::filesystem::path& path, const Scene& scene) {
  write_file_atomic(path, scene_to_json(scene).dump(2) + "\n");
}

Dataset ingest_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".json") continue;
    if (name.size() > 10 && name.ends_with(".prov.json")) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(ErrorCode::kEmptyDataset, "no scene files in " + dir.string());

  std::vector<Scene> scenes;
  std::unordered_set<std::string> ids;
  for (const auto& f : files) {
    Scene s = read_scene_file(f);
    if (!ids.insert(s.scene_id).second) {
      throw Error(ErrorCode::kDuplicateSceneId, s.scene_id + " (" + f.string() + ")");
    }
    scenes.push_back(std::move(s));
  }
  return make_dataset(std::move(scenes));
}

std::string file_stem_for(std::string_view scene_id) {
  std::string out(scene_id);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
  std::filesystem::create_directories(dir);
  for (const auto& s : dataset.scenes) {
    write_scene_file(dir / (file_stem_for(s.scene_id) + ".json"), s);
  }
}

}  // namespace oodfair
