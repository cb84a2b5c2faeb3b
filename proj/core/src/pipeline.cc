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

#include "oodfair/pipeline.h"

#include <algorithm>
#include <chrono>
#include <set>

#include "oodfair/accuracy.h"
#include "oodfair/clustering.h"
#include "oodfair/detect_batch.h"
#include "oodfair/distribution.h"
#include "oodfair/errors.h"
#include "oodfair/fairness.h"
#include "oodfair/mutation.h"
#include "oodfair/report.h"
#include "oodfair/rng.h"
#include "oodfair/scene_io.h"
#include "oodfair/stats.h"
#include "oodfair/synthetic.h"

namespace oodfair {

namespace fs = std::filesystem;
using json = nlohmann::json;

bool RunManifest::done(std::string_view stage) const {
  auto it = stages.find(std::string(stage));
  return it != stages.end() && it->second.done;
}

json RunManifest::to_json() const {
  json st = json::object();
  for (const auto& [name, r] : stages) {
    st[name] = {{"done", r.done}, {"count", r.count}, {"seconds", r.seconds}, {"details", r.details}};
  }
  json j = {{"config_digest", config_digest}, {"stages", st}};
  if (failed_stage) j["failure"] = {{"stage", *failed_stage}, {"message", failure}};
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.config_digest = j.at("config_digest").get<std::string>();
  for (const auto& [name, r] : j.at("stages").items()) {
    m.stages[name] = {r.at("done").get<bool>(), r.at("count").get<long long>(),
                      r.at("seconds").get<double>(), r.value("details", json::object())};
  }
  if (j.contains("failure")) {
    m.failed_stage = j["failure"].at("stage").get<std::string>();
    m.failure = j["failure"].at("message").get<std::string>();
  }
  return m;
}

namespace {

constexpr const char* kManifest = "manifest.json";

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

void write_json(const fs::path& p, const json& j) { write_file_atomic(p, j.dump(2) + "\n"); }

std::size_t stage_index(std::string_view stage) {
  auto it = std::find(kStages.begin(), kStages.end(), stage);
  if (it == kStages.end()) {
    throw Error(ErrorCode::kConfig, "unknown stage '" + std::string(stage) + "'");
  }
  return static_cast<std::size_t>(it - kStages.begin());
}

struct MutantEntry {
  json provenance;
  Scene scene;
  const Scene* source = nullptr;
};

std::vector<DistributionMode> set_modes(const PipelineConfig& c) {
  std::vector<DistributionMode> out = {c.distribution_mode};
  if (c.compare_id_baseline && c.distribution_mode == DistributionMode::kOod) {
    out.push_back(DistributionMode::kId);
  }
  return out;
}

std::string set_name(DistributionMode m) { return m == DistributionMode::kOod ? "ood" : "id"; }

// Mutants of one set, in index order, with their source scenes.
std::vector<MutantEntry> load_mutants(const fs::path& out, const std::string& set,
                                      const Dataset& dataset) {
  std::vector<MutantEntry> entries;
  const json index = read_json(out / ("mutants_" + set + "_index.json"));
  for (const auto& p : index) {
    if (!p.contains("mutant")) continue;
    MutantEntry e;
    e.provenance = p;
    e.scene = read_scene_file(out / ("mutants_" + set) /
                              (file_stem_for(p["mutant"].get<std::string>()) + ".json"));
    e.source = dataset.find(p["source"].get<std::string>());
    if (e.source == nullptr) {
      throw Error(ErrorCode::kStageFailure, "mutant " + e.scene.scene_id + " has unknown source");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

using RecordMap = std::map<std::pair<std::string, std::string>, DetectionRecord>;

RecordMap load_records(const fs::path& out) {
  RecordMap m;
  for (auto& r : records_from_jsonl(read_file(out / "detections.jsonl"))) {
    auto key = std::make_pair(r.scene_id, r.subject_id);
    m.emplace(std::move(key), std::move(r));
  }
  return m;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

MwComparison compare_samples(const std::string& subject, const std::string& name,
                             const std::vector<double>& a, const std::vector<double>& b) {
  MwComparison c{subject, name, a.size(), b.size(), mean(a), mean(b), std::nullopt};
  try {
    c.result = mann_whitney_u(a, b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateSamples) throw;
  }
  return c;
}

}  // namespace

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::string digest = config_.digest();
  const fs::path mpath = config_.output_dir / kManifest;
  if (fs::exists(mpath)) {
    try {
      manifest_ = RunManifest::from_json(read_json(mpath));
    } catch (const std::exception&) {
      manifest_ = {};
    }
  }
  if (manifest_.config_digest != digest) {
    manifest_ = {};
    manifest_.config_digest = digest;
  }
}

void Pipeline::save_manifest() const { write_json(config_.output_dir / kManifest, manifest_.to_json()); }

const RunManifest& Pipeline::run() {
  for (std::string_view stage : kStages) {
    if (!manifest_.done(stage)) run_stage(stage);
  }
  return manifest_;
}

void Pipeline::run_stage(std::string_view stage) {
  const std::size_t idx = stage_index(stage);
  for (std::size_t i = 0; i < idx; ++i) {
    if (!manifest_.done(kStages[i])) {
      throw Error(ErrorCode::kStageFailure, std::string(stage) + ": stage '" +
                                                std::string(kStages[i]) + "' has not completed");
    }
  }
  for (std::size_t i = idx; i < kStages.size(); ++i) manifest_.stages.erase(std::string(kStages[i]));
  manifest_.failed_stage.reset();
  manifest_.failure.clear();
  fs::create_directories(config_.output_dir);

  const auto start = std::chrono::steady_clock::now();
  StageRecord rec;
  try {
    switch (idx) {
      case 0: rec.count = stage_ingest(rec.details); break;
      case 1: rec.count = stage_cluster(rec.details); break;
      case 2: rec.count = stage_learn(rec.details); break;
      case 3: rec.count = stage_mutate(rec.details); break;
      case 4: rec.count = stage_detect(rec.details); break;
      case 5: rec.count = stage_analyze(rec.details); break;
      default: rec.count = stage_report(rec.details); break;
    }
  } catch (const std::exception& e) {
    manifest_.failed_stage = std::string(stage);
    manifest_.failure = e.what();
    save_manifest();
    if (const auto* err = dynamic_cast<const Error*>(&e); err && err->code() == ErrorCode::kConfig) {
      throw;
    }
    throw Error(ErrorCode::kStageFailure, std::string(stage) + ": " + e.what());
  }
  rec.done = true;
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest_.stages[std::string(stage)] = std::move(rec);
  save_manifest();
}

long long Pipeline::stage_ingest(json& details) {
  Dataset dataset;
  if (config_.synthetic) {
    json opts = *config_.synthetic;
    if (!opts.contains("seed")) opts["seed"] = derive_seed(config_.seed, "synthetic");
    dataset = generate_synthetic(SyntheticOptions::from_json(opts));
    details["source"] = "synthetic";
  } else {
    dataset = ingest_dataset(config_.dataset_dir);
    details["source"] = config_.dataset_dir.string();
  }
  const fs::path dir = config_.output_dir / "dataset";
  fs::remove_all(dir);
  write_dataset(dir, dataset);
  details["classes"] = dataset.ordered_classes();
  return static_cast<long long>(dataset.scenes.size());
}

long long Pipeline::stage_cluster(json& details) {
  const Dataset dataset = ingest_dataset(config_.output_dir / "dataset");
  const std::uint64_t seed = derive_seed(config_.seed, "cluster");
  const int k = config_.k ? *config_.k : choose_k(dataset, config_.k_max, seed);
  const ClusterAssignment a = cluster_dataset(dataset, k, seed);
  write_json(config_.output_dir / "cluster.json", cluster_report_json(a));
  details["k"] = a.k;
  details["k_source"] = config_.k ? "config" : "silhouette";
  return a.k;
}

long long Pipeline::stage_learn(json&) {
  const Dataset dataset = ingest_dataset(config_.output_dir / "dataset");
  const ClusterAssignment a = cluster_report_from_json(read_json(config_.output_dir / "cluster.json"));
  std::set<std::string> universe = dataset.class_universe;
  for (const auto& [op, classes] : config_.mutable_classes) universe.insert(classes.begin(), classes.end());

  json out = json::array();
  for (int c = 0; c < a.k; ++c) {
    std::vector<const Scene*> members;
    for (const auto& s : dataset.scenes) {
      auto it = a.assignments.find(s.scene_id);
      if (it != a.assignments.end() && it->second == c) members.push_back(&s);
    }
    out.push_back(distribution_to_json(learn_distribution(members, universe, config_.bin_width_deg, c)));
  }
  write_json(config_.output_dir / "distributions.json", out);
  return a.k;
}

std::vector<std::string> Pipeline::mutant_sets() const {
  std::vector<std::string> out;
  for (auto m : set_modes(config_)) out.push_back(set_name(m));
  return out;
}

long long Pipeline::stage_mutate(json& details) {
  const fs::path out = config_.output_dir;
  const Dataset dataset = ingest_dataset(out / "dataset");
  const ClusterAssignment a = cluster_report_from_json(read_json(out / "cluster.json"));
  std::vector<ClusterDistribution> dists;
  for (const auto& d : read_json(out / "distributions.json")) dists.push_back(distribution_from_json(d));

  long long emitted_total = 0;
  for (DistributionMode mode : set_modes(config_)) {
    const std::string name = set_name(mode);
    const fs::path dir = out / ("mutants_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto results = generate_ood_set(dataset, a, dists, config_.generation(mode));
    json index = json::array();
    long long emitted = 0;
    std::map<std::string, long long> skipped;
    for (const auto& r : results) {
      const json prov = provenance_json(r);
      index.push_back(prov);
      if (!r.mutant) {
        ++skipped[std::string(skip_reason_name(*r.skip))];
        continue;
      }
      const std::string stem = file_stem_for(r.mutant->scene_id);
      write_scene_file(dir / (stem + ".json"), *r.mutant);
      write_json(dir / (stem + ".prov.json"), prov);
      ++emitted;
    }
    write_json(out / ("mutants_" + name + "_index.json"), index);
    details[name] = {{"attempted", results.size()}, {"emitted", emitted}, {"skipped", skipped}};
    emitted_total += emitted;
  }
  return emitted_total;
}

long long Pipeline::stage_detect(json& details) {
  const fs::path out = config_.output_dir;
  const Dataset dataset = ingest_dataset(out / "dataset");
  std::vector<Scene> scenes = dataset.scenes;
  for (const auto& set : mutant_sets()) {
    for (auto& e : load_mutants(out, set, dataset)) scenes.push_back(std::move(e.scene));
  }
  const auto subjects = make_subjects(config_);
  std::vector<const Detector*> handles;
  for (const auto& s : subjects) handles.push_back(s.get());

  const BatchResult batch = detect_batch(scenes, handles, config_.cache_dir, config_.parallelism);
  write_file_atomic(out / "detections.jsonl", records_to_jsonl(batch.records));
  json failures = json::array();
  for (const auto& f : batch.failures) {
    failures.push_back({{"scene_id", f.scene_id}, {"subject_id", f.subject_id},
                        {"error", error_code_name(f.code)}, {"message", f.message}});
  }
  write_json(out / "detect_failures.json", failures);
  if (batch.records.empty() && !batch.failures.empty()) {
    throw Error(ErrorCode::kStageFailure, "every detection failed: " + batch.failures.front().message);
  }
  details["queries"] = batch.queries;
  details["cache_hits"] = batch.cache_hits;
  details["failures"] = batch.failures.size();
  return static_cast<long long>(batch.records.size());
}

long long Pipeline::stage_analyze(json& details) {
  const fs::path out = config_.output_dir;
  const Dataset dataset = ingest_dataset(out / "dataset");
  const RecordMap records = load_records(out);
  std::map<std::string, std::vector<MutantEntry>> sets;
  for (const auto& set : mutant_sets()) sets[set] = load_mutants(out, set, dataset);

  std::vector<std::string> subject_ids;
  for (const auto& s : make_subjects(config_)) subject_ids.push_back(s->subject_id());
  auto find = [&](const std::string& scene, const std::string& subject) -> const DetectionRecord* {
    auto it = records.find({scene, subject});
    return it == records.end() ? nullptr : &it->second;
  };

  // GT references pool every subject's detections on the original.
  std::map<std::string, OracleReference> refs;
  if (config_.oracle == OracleMode::kGt) {
    for (const auto& s : dataset.scenes) {
      std::vector<DetectionRecord> recs;
      for (const auto& id : subject_ids) {
        if (const auto* r = find(s.scene_id, id)) recs.push_back(*r);
      }
      refs.emplace(s.scene_id, build_reference(s.scene_id, s.gt_counts, recs));
    }
  }

  std::vector<std::pair<std::string, ErrType>> variants;
  if (config_.oracle == OracleMode::kGt) {
    variants.emplace_back("gt", ErrType::kExclusion);
  } else {
    for (ErrType t : config_.err_types) variants.emplace_back(std::string(err_type_name(t)), t);
  }
  // Baseline comparisons count every class.
  const bool filtering = config_.filtering && !config_.compare_id_baseline;

  AnalysisResult analysis;
  analysis.oracle = config_.oracle;
  long long missing = 0;
  std::map<std::string, std::set<std::string>> insert_inducing;  // subject -> mutant ids

  for (const auto& subject : subject_ids) {
    for (const auto& [set, mutants] : sets) {
      std::map<std::string, std::vector<EvaluatedPair>> by_op;
      for (const auto& m : mutants) {
        const auto* orig = find(m.source->scene_id, subject);
        const auto* mut = find(m.scene.scene_id, subject);
        if (orig == nullptr || mut == nullptr) {
          ++missing;
          continue;
        }
        EvaluatedPair p{m.scene.scene_id, m.provenance["class"].get<std::string>(), *orig, *mut,
                        std::nullopt};
        if (config_.oracle == OracleMode::kGt) p.reference = refs.at(m.source->scene_id);
        by_op[m.provenance["op"].get<std::string>()].push_back(std::move(p));
      }
      std::vector<std::string> op_names;
      for (MutationOp op : config_.ops) op_names.emplace_back(mutation_op_name(op));
      if (op_names.size() > 1) op_names.emplace_back("all");
      for (const auto& op : op_names) {
        std::vector<EvaluatedPair> pairs;
        if (op == "all") {
          for (const auto& name : op_names) {
            auto it = by_op.find(name);
            if (it != by_op.end()) pairs.insert(pairs.end(), it->second.begin(), it->second.end());
          }
        } else if (auto it = by_op.find(op); it != by_op.end()) {
          pairs = it->second;
        }
        ReportRow row{subject, config_.dataset_name, op, set, static_cast<long long>(pairs.size()), {}};
        for (const auto& [vname, type] : variants) {
          const ErrorLedger ledger = accumulate(pairs, config_.oracle, type);
          std::optional<FairnessReport> report;
          try {
            report = detect_violations(ledger, config_.min_class_count, filtering);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kEmptyAfterFiltering) throw;
          }
          if (report && op == "insert" && set == "ood" && vname == variants.front().first) {
            insert_inducing[subject].insert(report->error_inducing_inputs.begin(),
                                            report->error_inducing_inputs.end());
          }
          row.variants[vname] = std::move(report);
        }
        analysis.rows.push_back(std::move(row));
      }
    }
  }

  // Per-image error rates: originals versus mutants, and ID versus OOD mutants.
  auto mutant_rates = [&](const std::vector<MutantEntry>& mutants, const std::string& subject) {
    std::vector<double> v;
    for (const auto& m : mutants) {
      if (const auto* r = find(m.scene.scene_id, subject)) {
        v.push_back(image_error_rate(r->counts, m.scene.gt_counts,
                                     m.provenance["class"].get<std::string>()));
      }
    }
    return v;
  };
  for (const auto& subject : subject_ids) {
    std::vector<double> original;
    for (const auto& s : dataset.scenes) {
      if (const auto* r = find(s.scene_id, subject)) original.push_back(image_error_rate(r->counts, s.gt_counts));
    }
    if (sets.contains("ood")) {
      const auto ood = mutant_rates(sets["ood"], subject);
      if (!original.empty() && !ood.empty()) {
        analysis.mann_whitney.push_back(compare_samples(subject, "original_vs_ood", original, ood));
      }
      if (sets.contains("id")) {
        const auto id = mutant_rates(sets["id"], subject);
        if (!id.empty() && !ood.empty()) {
          analysis.mann_whitney.push_back(compare_samples(subject, "id_vs_ood", id, ood));
        }
      }
    }
  }

  // Accuracy on insertion mutants against real scenes with the same expected counts.
  const std::set<std::string>& considered = dataset.class_universe;
  const std::string primary = set_name(config_.distribution_mode);
  for (const auto& subject : subject_ids) {
    std::vector<AccuracyItem> items, inducing_items;
    long long unmatched = 0;
    for (const auto& m : sets[primary]) {
      if (m.provenance["op"] != "insert") continue;
      const std::string cls = m.provenance["class"].get<std::string>();
      const ClassCounts expected =
          ood_accuracy_oracle(m.source->gt_counts, considered, cls, m.provenance["count"].get<int>());
      std::set<std::string> match_classes = considered;
      match_classes.insert(cls);
      const auto real = pair_with_real(expected, dataset.scenes, match_classes,
                                       derive_seed(config_.seed, "pair/" + m.scene.scene_id));
      const auto* ood_rec = find(m.scene.scene_id, subject);
      if (!real || ood_rec == nullptr) {
        ++unmatched;
        continue;
      }
      const Scene& rs = dataset.scenes[*real];
      const auto* real_rec = find(rs.scene_id, subject);
      if (real_rec == nullptr) {
        ++unmatched;
        continue;
      }
      AccuracyItem item{m.scene.scene_id, cls, ood_rec->counts, expected, real_rec->counts,
                        restrict_counts(rs.gt_counts, match_classes)};
      if (insert_inducing[subject].contains(m.scene.scene_id)) inducing_items.push_back(item);
      items.push_back(std::move(item));
    }
    analysis.accuracy.push_back({subject, "ood_vs_real", unmatched, accuracy_comparison(items)});
    analysis.accuracy.push_back({subject, "non_mutated_error_inducing", 0,
                                 accuracy_comparison(inducing_items, true)});
  }

  write_json(out / "analysis.json", analysis.to_json());
  details["missing_pairs"] = missing;
  return static_cast<long long>(analysis.rows.size());
}

long long Pipeline::stage_report(json& details) {
  const fs::path out = config_.output_dir;
  const AnalysisResult analysis = AnalysisResult::from_json(read_json(out / "analysis.json"));
  const fs::path dir = reports_dir();
  fs::remove_all(dir);

  json timing = json::object();
  double generation_seconds = 0.0;
  long long generated = 0;
  for (const auto& [name, r] : manifest_.stages) {
    timing["stage_seconds"][name] = r.seconds;
    if (name == "mutate" || name == "detect") generation_seconds += r.seconds;
    if (name == "mutate") generated = r.count;
  }
  timing["generated_inputs"] = generated;
  timing["seconds_per_generated_input"] =
      generated == 0 ? 0.0 : generation_seconds / static_cast<double>(generated);

  emit_reports(analysis, dir, timing);
  details["dir"] = dir.string();
  return static_cast<long long>(analysis.rows.size());
}

}  // namespace oodfair
