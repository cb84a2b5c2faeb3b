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

#include "oodfair/config.h"

#include <set>

#include "oodfair/errors.h"
#include "oodfair/http_detector.h"
#include "oodfair/rng.h"
#include "oodfair/scene_io.h"

namespace oodfair {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::kConfig, msg); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::vector<MutationOp> parse_ops(const json& j) {
  std::vector<MutationOp> ops;
  std::vector<std::string> names;
  if (j.is_string()) {
    std::string s = j.get<std::string>(), cur;
    for (char c : s + ",") {
      if (c == ',') {
        if (!cur.empty()) names.push_back(cur);
        cur.clear();
      } else if (c != ' ') {
        cur.push_back(c);
      }
    }
  } else {
    names = j.get<std::vector<std::string>>();
  }
  for (const auto& n : names) {
    auto op = parse_mutation_op(n);
    if (!op) bad("unknown mutation op '" + n + "'");
    if (std::find(ops.begin(), ops.end(), *op) == ops.end()) ops.push_back(*op);
  }
  return ops;
}

std::vector<ErrType> parse_err_types(const std::string& s) {
  if (s == "both") return {ErrType::kExclusion, ErrType::kInclusion};
  auto t = parse_err_type(s);
  if (!t) bad("unknown err_type '" + s + "' (exclusion, inclusion or both)");
  return {*t};
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> known = {
      "dataset_dir", "synthetic",        "output_dir",   "cache_dir",       "dataset_name",
      "seed",        "k",                "k_max",        "ops",             "mutable_classes",
      "iterations",  "oracle",           "err_type",     "min_class_count", "filtering",
      "distribution_mode", "compare_id_baseline", "subjects", "surplus_max", "bin_width_deg",
      "relative_sizes", "insertion",     "parallelism"};
  for (const auto& [key, v] : j.items()) {
    if (!known.contains(key)) bad("unknown config key '" + key + "'");
  }

  PipelineConfig c;
  try {
    if (j.contains("dataset_dir")) c.dataset_dir = resolve(base, j["dataset_dir"].get<std::string>());
    if (j.contains("synthetic")) c.synthetic = j["synthetic"];
    if (j.contains("output_dir")) c.output_dir = resolve(base, j["output_dir"].get<std::string>());
    if (j.contains("cache_dir") && !j["cache_dir"].is_null()) {
      c.cache_dir = resolve(base, j["cache_dir"].get<std::string>());
    }
    c.dataset_name = j.value("dataset_name", c.dataset_name);
    c.seed = j.value("seed", c.seed);
    if (j.contains("k")) {
      const auto& k = j["k"];
      if (k.is_string()) {
        if (k.get<std::string>() != "auto") bad("k must be an integer or \"auto\"");
        c.k.reset();
      } else {
        c.k = k.get<int>();
      }
    }
    c.k_max = j.value("k_max", c.k_max);
    if (j.contains("ops")) c.ops = parse_ops(j["ops"]);
    if (j.contains("mutable_classes")) {
      for (const auto& [name, classes] : j["mutable_classes"].items()) {
        auto op = parse_mutation_op(name);
        if (!op) bad("unknown mutation op '" + name + "' in mutable_classes");
        c.mutable_classes[*op] = classes.get<std::vector<std::string>>();
      }
    }
    c.iterations = j.value("iterations", c.iterations);
    if (j.contains("oracle")) {
      auto m = parse_oracle_mode(j["oracle"].get<std::string>());
      if (!m) bad("oracle must be gt or mt");
      c.oracle = *m;
    }
    if (j.contains("err_type")) c.err_types = parse_err_types(j["err_type"].get<std::string>());
    c.min_class_count = j.value("min_class_count", c.min_class_count);
    c.filtering = j.value("filtering", c.filtering);
    if (j.contains("distribution_mode")) {
      const auto m = j["distribution_mode"].get<std::string>();
      if (m == "ood") {
        c.distribution_mode = DistributionMode::kOod;
      } else if (m == "id") {
        c.distribution_mode = DistributionMode::kId;
      } else {
        bad("distribution_mode must be ood or id");
      }
    }
    c.compare_id_baseline = j.value("compare_id_baseline", c.compare_id_baseline);
    if (j.contains("subjects")) {
      for (const auto& s : j["subjects"]) c.subjects.push_back(s);
    }
    c.surplus_max = j.value("surplus_max", c.surplus_max);
    c.bin_width_deg = j.value("bin_width_deg", c.bin_width_deg);
    if (j.contains("relative_sizes")) {
      const auto& rs = j["relative_sizes"];
      c.sizes = rs.is_string()
                    ? RelativeSizeTable::from_json(
                          json::parse(read_file(resolve(base, rs.get<std::string>()))))
                    : RelativeSizeTable::from_json(rs);
    }
    if (j.contains("insertion")) {
      const auto& ins = j["insertion"];
      c.insertion.occlusion_threshold =
          ins.value("occlusion_threshold", c.insertion.occlusion_threshold);
      c.insertion.max_attempts = ins.value("max_attempts", c.insertion.max_attempts);
      c.insertion.min_height_px = ins.value("min_height_px", c.insertion.min_height_px);
      if (ins.contains("aspect_ratios")) {
        for (const auto& [label, a] : ins["aspect_ratios"].items()) {
          c.insertion.aspect_ratios[label] = a.get<double>();
        }
      }
      if (ins.contains("grid")) {
        c.insertion.resolution = GridResolution{ins["grid"].at(0).get<int>(),
                                                ins["grid"].at(1).get<int>()};
      }
    }
    c.parallelism = j.value("parallelism", c.parallelism);
  } catch (const json::exception& e) {
    bad(std::string("config: ") + e.what());
  }
  if (c.subjects.empty()) c.subjects.push_back(SimulatedDetectorConfig{}.to_json());
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  } catch (const Error& e) {
    bad(e.what());
  }
  return from_json(j, path.parent_path());
}

void PipelineConfig::validate() const {
  if (dataset_dir.empty() && !synthetic) bad("either dataset_dir or synthetic is required");
  if (k && *k < 1) bad("k must be >= 1");
  if (k_max < 2) bad("k_max must be >= 2");
  if (ops.empty()) bad("at least one mutation op is required");
  if (iterations < 1) bad("iterations must be >= 1");
  if (min_class_count < 0) bad("min_class_count must be >= 0");
  if (surplus_max < 0) bad("surplus_max must be >= 0");
  if (!(bin_width_deg > 0.0 && bin_width_deg <= 360.0)) bad("bin_width_deg must be in (0, 360]");
  if (parallelism < 1) bad("parallelism must be >= 1");
  if (err_types.empty()) bad("err_type is empty");
  if (!(insertion.occlusion_threshold >= 0.0 && insertion.occlusion_threshold <= 1.0)) {
    bad("occlusion_threshold must be in [0, 1]");
  }
  if (insertion.max_attempts < 1) bad("max_attempts must be >= 1");
  sizes.validate();
  for (const auto& [op, classes] : mutable_classes) {
    if (op != MutationOp::kInsert) continue;
    for (const auto& label : classes) {
      if (!sizes.has(label)) bad("insertable class '" + label + "' has no relative size");
    }
  }
  std::set<std::string> ids;
  for (const auto& s : subjects) {
    const std::string type = s.value("type", std::string("simulated"));
    std::string id;
    try {
      if (type == "simulated") {
        id = SimulatedDetectorConfig::from_json(s).subject_id;
      } else if (type == "http") {
        id = HttpDetectorConfig::from_json(s).subject_id;
      } else {
        bad("unknown subject type '" + type + "'");
      }
    } catch (const json::exception& e) {
      bad(std::string("subject: ") + e.what());
    }
    if (!ids.insert(id).second) bad("duplicate subject_id '" + id + "'");
  }
}

json PipelineConfig::to_json() const {
  json classes = json::object();
  for (const auto& [op, labels] : mutable_classes) classes[std::string(mutation_op_name(op))] = labels;
  json op_names = json::array();
  for (MutationOp op : ops) op_names.push_back(mutation_op_name(op));
  json errs = json::array();
  for (ErrType t : err_types) errs.push_back(err_type_name(t));
  json ins = {{"occlusion_threshold", insertion.occlusion_threshold},
              {"max_attempts", insertion.max_attempts},
              {"min_height_px", insertion.min_height_px},
              {"aspect_ratios", insertion.aspect_ratios}};
  if (insertion.resolution) ins["grid"] = {insertion.resolution->cols, insertion.resolution->rows};
  json j = {{"dataset_dir", dataset_dir.string()},
            {"output_dir", output_dir.string()},
            {"cache_dir", cache_dir ? json(cache_dir->string()) : json(nullptr)},
            {"dataset_name", dataset_name},
            {"seed", seed},
            {"k", k ? json(*k) : json("auto")},
            {"k_max", k_max},
            {"ops", op_names},
            {"mutable_classes", classes},
            {"iterations", iterations},
            {"oracle", oracle_mode_name(oracle)},
            {"err_types", errs},
            {"min_class_count", min_class_count},
            {"filtering", filtering},
            {"distribution_mode", distribution_mode == DistributionMode::kOod ? "ood" : "id"},
            {"compare_id_baseline", compare_id_baseline},
            {"subjects", subjects},
            {"surplus_max", surplus_max},
            {"bin_width_deg", bin_width_deg},
            {"relative_sizes", sizes.to_json()},
            {"insertion", ins},
            {"parallelism", parallelism}};
  if (synthetic) j["synthetic"] = *synthetic;
  return j;
}

std::string PipelineConfig::digest() const {
  json j = to_json();
  j.erase("output_dir");
  j.erase("cache_dir");
  j.erase("parallelism");
  return sha256_hex(j.dump());
}

GenerationConfig PipelineConfig::generation(DistributionMode mode) const {
  GenerationConfig g;
  g.ops = ops;
  g.classes = mutable_classes;
  g.iterations = iterations;
  g.surplus_max = surplus_max;
  g.mode = mode;
  g.sizes = sizes;
  g.insertion = insertion;
  g.seed = derive_seed(seed, mode == DistributionMode::kOod ? "mutate" : "mutate-id");
  return g;
}

std::vector<std::unique_ptr<Detector>> make_subjects(const PipelineConfig& config) {
  std::vector<std::unique_ptr<Detector>> out;
  for (const auto& s : config.subjects) {
    if (s.value("type", std::string("simulated")) == "http") {
      out.push_back(std::make_unique<HttpDetector>(HttpDetectorConfig::from_json(s)));
    } else {
      out.push_back(std::make_unique<SimulatedDetector>(SimulatedDetectorConfig::from_json(s)));
    }
  }
  return out;
}

}  // namespace oodfair
