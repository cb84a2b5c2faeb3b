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

// oodfair: command line driver for the fairness testing pipeline.
//
//   oodfair run --config cfg.json --seed 7
//   oodfair mutate --config cfg.json    (needs ingest, cluster, learn-dist)
//   oodfair synth --scenes 120 --out data/
//
// Exit codes: 0 success, 2 configuration error, 3 stage failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oodfair/config.h"
#include "oodfair/errors.h"
#include "oodfair/pipeline.h"
#include "oodfair/scene_io.h"
#include "oodfair/synthetic.h"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

struct Overrides {
  std::string config;
  std::string dataset_dir;
  std::string output_dir;
  std::string cache_dir;
  std::optional<std::uint64_t> seed;
  std::string k;
  std::string ops;
  std::string oracle;
  std::string err_type;
  std::string distribution_mode;
  std::optional<int> min_class_count;
  std::optional<int> iterations;
  std::optional<int> parallelism;
  bool compare_id_baseline = false;
  bool no_filtering = false;
};

void add_pipeline_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--dataset-dir", o.dataset_dir, "directory of scene JSON files");
  cmd->add_option("-o,--output-dir", o.output_dir, "run directory");
  cmd->add_option("--cache-dir", o.cache_dir, "detection cache directory");
  cmd->add_option("--seed", o.seed, "global seed");
  cmd->add_option("--k", o.k, "number of clusters or 'auto'");
  cmd->add_option("--ops", o.ops, "comma separated subset of insert,delete,rotate");
  cmd->add_option("--oracle", o.oracle, "gt or mt")->check(CLI::IsMember({"gt", "mt"}));
  cmd->add_option("--err-type", o.err_type, "exclusion, inclusion or both")
      ->check(CLI::IsMember({"exclusion", "inclusion", "both"}));
  cmd->add_option("--distribution-mode", o.distribution_mode, "ood or id")
      ->check(CLI::IsMember({"ood", "id"}));
  cmd->add_option("--min-class-count", o.min_class_count, "minimum Tot_Count per class");
  cmd->add_option("--iterations", o.iterations, "repetitions of insert and rotate");
  cmd->add_option("--parallelism", o.parallelism, "concurrent detector requests");
  cmd->add_flag("--compare-id-baseline", o.compare_id_baseline,
                "also generate in-distribution mutants and compare");
  cmd->add_flag("--no-filtering", o.no_filtering, "count every class regardless of Tot_Count");
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

oodfair::PipelineConfig build_config(const Overrides& o) {
  json j = json::object();
  fs::path base;
  if (!o.config.empty()) {
    try {
      j = json::parse(oodfair::read_file(o.config));
    } catch (const json::parse_error& e) {
      throw oodfair::Error(oodfair::ErrorCode::kConfig, o.config + ": " + e.what());
    }
    base = fs::absolute(o.config).parent_path();
  }
  if (!o.dataset_dir.empty()) {
    j["dataset_dir"] = absolute(o.dataset_dir);
    j.erase("synthetic");
  }
  if (!o.output_dir.empty()) j["output_dir"] = absolute(o.output_dir);
  if (!o.cache_dir.empty()) j["cache_dir"] = absolute(o.cache_dir);
  if (o.seed) j["seed"] = *o.seed;
  if (!o.k.empty()) {
    if (o.k == "auto") {
      j["k"] = "auto";
    } else {
      try {
        j["k"] = std::stoi(o.k);
      } catch (const std::exception&) {
        throw oodfair::Error(oodfair::ErrorCode::kConfig, "--k must be an integer or 'auto'");
      }
    }
  }
  if (!o.ops.empty()) j["ops"] = o.ops;
  if (!o.oracle.empty()) j["oracle"] = o.oracle;
  if (!o.err_type.empty()) j["err_type"] = o.err_type;
  if (!o.distribution_mode.empty()) j["distribution_mode"] = o.distribution_mode;
  if (o.min_class_count) j["min_class_count"] = *o.min_class_count;
  if (o.iterations) j["iterations"] = *o.iterations;
  if (o.parallelism) j["parallelism"] = *o.parallelism;
  if (o.compare_id_baseline) j["compare_id_baseline"] = true;
  if (o.no_filtering) j["filtering"] = false;
  return oodfair::PipelineConfig::from_json(j, base);
}

void print_manifest(const oodfair::RunManifest& m) {
  for (std::string_view stage : oodfair::kStages) {
    auto it = m.stages.find(std::string(stage));
    if (it == m.stages.end()) continue;
    std::printf("%-11s %s count=%lld %.3fs\n", std::string(stage).c_str(),
                it->second.done ? "done" : "pending", it->second.count, it->second.seconds);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-level fairness testing with out-of-distribution scene mutations"};
  app.require_subcommand(1);
  Overrides o;

  std::vector<std::pair<std::string, CLI::App*>> stage_cmds;
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"ingest", "load and validate the scene corpus"},
      {"cluster", "group scenes by per-class object counts"},
      {"learn-dist", "learn per-cluster count and orientation envelopes"},
      {"mutate", "generate insert/delete/rotate mutants"},
      {"detect", "run every subject on originals and mutants"},
      {"analyze", "count errors and flag violating classes"},
      {"report", "write CSV and JSON reports"}};
  for (const auto& [name, help] : stages) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_pipeline_flags(cmd, o);
    stage_cmds.emplace_back(name, cmd);
  }
  CLI::App* run = app.add_subcommand("run", "run every stage, resuming completed ones");
  add_pipeline_flags(run, o);

  int synth_scenes = 120;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic road-scene corpus");
  synth->add_option("--scenes", synth_scenes, "number of scenes")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "corpus seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  std::string coco_file, coco_out;
  std::vector<std::string> ground;
  CLI::App* coco = app.add_subcommand("import-coco", "convert COCO-style annotations to scenes");
  coco->add_option("--annotations", coco_file, "annotation JSON")->required()->check(CLI::ExistingFile);
  coco->add_option("--out", coco_out, "output directory")->required();
  coco->add_option("--ground-category", ground, "category treated as ground (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (synth->parsed()) {
      oodfair::SyntheticOptions opts;
      opts.scenes = synth_scenes;
      opts.seed = synth_seed;
      const auto ds = oodfair::generate_synthetic(opts);
      oodfair::write_dataset(synth_out, ds);
      std::printf("wrote %zu scenes to %s\n", ds.scenes.size(), synth_out.c_str());
      return 0;
    }
    if (coco->parsed()) {
      oodfair::CocoImportOptions opts;
      if (!ground.empty()) opts.ground_categories = {ground.begin(), ground.end()};
      const auto ds =
          oodfair::import_coco(json::parse(oodfair::read_file(coco_file)), opts);
      oodfair::write_dataset(coco_out, ds);
      std::printf("wrote %zu scenes to %s\n", ds.scenes.size(), coco_out.c_str());
      return 0;
    }

    oodfair::Pipeline pipeline(build_config(o));
    if (run->parsed()) {
      print_manifest(pipeline.run());
      std::printf("reports: %s\n", pipeline.reports_dir().string().c_str());
      return 0;
    }
    for (const auto& [name, cmd] : stage_cmds) {
      if (cmd->parsed()) {
        pipeline.run_stage(name);
        print_manifest(pipeline.manifest());
        return 0;
      }
    }
  } catch (const oodfair::Error& e) {
    std::cerr << "oodfair: " << e.what() << "\n";
    return e.code() == oodfair::ErrorCode::kConfig ? kExitConfig : kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "oodfair: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
