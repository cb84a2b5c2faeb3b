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

#ifndef OODFAIR_SCENE_IO_H_
#define OODFAIR_SCENE_IO_H_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "oodfair/scene.h"

namespace oodfair {

nlohmann::json scene_to_json(const Scene& scene);

// Parses the scene schema strictly (types, required keys) and validates the
// invariants. `source` names the origin in error messages.
Scene scene_from_json(const nlohmann::json& j, std::string_view source);

// Compact, key-sorted serialisation. Equal scenes produce equal strings; this
// is the form hashed into detection cache keys.
std::string canonical_json(const Scene& scene);

Scene read_scene_file(const std::filesystem::path& path);
void write_scene_file(const std::filesystem::path& path, const Scene& scene);

// Reads every *.json scene file in `dir` (sorted by file name; *.prov.json
// sidecars are ignored). Throws MalformedScene, DuplicateSceneId or
// EmptyDataset; nothing is repaired.
Dataset ingest_dataset(const std::filesystem::path& dir);

// Filesystem-safe stem for a scene id: characters outside [A-Za-z0-9._-]
// become '_'.
std::string file_stem_for(std::string_view scene_id);

// Writes one <stem>.json per scene.
void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

// Writes `text` to `path` via a temporary file and rename, so readers never
// observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

struct CocoImportOptions {
  // Categories treated as ground instead of objects.
  std::set<std::string> ground_categories = {"road", "pavement", "sidewalk", "dirt",
                                             "ground", "parking", "gravel",
                                             "ground-other", "platform"};
};

// Converts a COCO-style annotation document (images / annotations /
// categories) into scenes. Orientation defaults to 0 and depth_rank is the
// rank of the box bottom edge (lower on the canvas = nearer). Boxes are
// rounded to whole pixels and clipped to the canvas.
Dataset import_coco(const nlohmann::json& coco, const CocoImportOptions& options = {});

}  // namespace oodfair

#endif  // OODFAIR_SCENE_IO_H_
