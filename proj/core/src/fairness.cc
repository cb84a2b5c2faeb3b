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

#include "oodfair/fairness.h"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "oodfair/errors.h"

namespace oodfair {

namespace {

constexpr double kTieEpsilon = 1e-12;

int lookup(const ClassCounts& m, std::string_view label) {
  auto it = m.find(std::string(label));
  return it == m.end() ? 0 : it->second;
}

}  // namespace

std::string_view oracle_mode_name(OracleMode mode) {
  return mode == OracleMode::kGt ? "gt" : "mt";
}

std::optional<OracleMode> parse_oracle_mode(std::string_view name) {
  if (name == "gt") return OracleMode::kGt;
  if (name == "mt") return OracleMode::kMt;
  return std::nullopt;
}

std::string_view err_type_name(ErrType type) {
  return type == ErrType::kExclusion ? "exclusion" : "inclusion";
}

std::optional<ErrType> parse_err_type(std::string_view name) {
  if (name == "exclusion" || name == "exc" || name == "ex") return ErrType::kExclusion;
  if (name == "inclusion" || name == "inc") return ErrType::kInclusion;
  return std::nullopt;
}

int OracleReference::at(std::string_view label) const { return lookup(gt_ref, label); }

OracleReference build_reference(const std::string& scene_id, const ClassCounts& gt_counts,
                                std::span<const DetectionRecord> subject_records) {
  OracleReference ref{scene_id, gt_counts};
  for (const auto& rec : subject_records) {
    for (const auto& [label, n] : rec.counts) {
      int& slot = ref.gt_ref[label];
      slot = std::max(slot, n);
    }
  }
  return ref;
}

ClassErrors gt_errors(const DetectionRecord& orig, const DetectionRecord& ood,
                      const OracleReference& ref, std::string_view mutated_class) {
  std::set<std::string> labels;
  for (const auto* m : {&ref.gt_ref, &orig.counts, &ood.counts}) {
    for (const auto& [label, n] : *m) labels.insert(label);
  }
  ClassErrors out;
  for (const auto& label : labels) {
    if (label == mutated_class) continue;
    const int gt = ref.at(label);
    out[label] = std::abs(ood.count(label) - gt) - std::abs(orig.count(label) - gt);
  }
  return out;
}

ClassErrors mt_errors(const DetectionRecord& orig, const DetectionRecord& ood,
                      std::string_view mutated_class, ErrType type) {
  std::set<std::string> labels;
  for (const auto* m : {&orig.counts, &ood.counts}) {
    for (const auto& [label, n] : *m) labels.insert(label);
  }
  ClassErrors out;
  for (const auto& label : labels) {
    if (label == mutated_class) continue;
    const int delta = ood.count(label) - orig.count(label);
    out[label] = type == ErrType::kInclusion ? std::max(delta, 0) : std::max(-delta, 0);
  }
  return out;
}

void ErrorLedger::merge(const ErrorLedger& other) {
  for (const auto& [label, t] : other.classes) {
    ClassTally& mine = classes[label];
    mine.tot += t.tot;
    mine.err += t.err;
    mine.err_images += t.err_images;
  }
  pairs.insert(pairs.end(), other.pairs.begin(), other.pairs.end());
}

ErrorLedger accumulate(std::span<const EvaluatedPair> pairs, OracleMode mode, ErrType type) {
  ErrorLedger ledger;
  for (const auto& p : pairs) {
    ClassErrors diff;
    if (mode == OracleMode::kGt) {
      if (!p.reference) {
        throw Error(ErrorCode::kStageFailure, p.mutant_id + ": GT oracle needs a reference");
      }
      diff = gt_errors(p.original, p.mutant, *p.reference, p.mutated_class);
    } else {
      diff = mt_errors(p.original, p.mutant, p.mutated_class, type);
    }
    for (const auto& [label, e] : diff) {
      ClassTally& t = ledger.classes[label];
      t.tot += mode == OracleMode::kGt ? p.reference->at(label) : p.original.count(label);
      t.err += e;
      if (e > 0) ++t.err_images;
    }
    ledger.pairs.push_back({p.mutant_id, std::move(diff)});
  }
  return ledger;
}

FairnessReport detect_violations(const ErrorLedger& ledger, int min_class_count,
                                 bool filtering_enabled) {
  FairnessReport report;
  double sum = 0.0;
  for (const auto& [label, t] : ledger.classes) {
    ClassResult r{label, t};
    r.included = t.tot > 0 && (!filtering_enabled || t.tot >= min_class_count);
    if (t.tot > 0) r.rate = static_cast<double>(t.err) / static_cast<double>(t.tot);
    if (r.included) {
      ++report.summary.classes;
      sum += r.rate;
    }
    report.classes.push_back(std::move(r));
  }
  if (report.summary.classes == 0) {
    throw Error(ErrorCode::kEmptyAfterFiltering, "no class passes the minimum count filter");
  }
  const double mean = sum / report.summary.classes;
  report.summary.mean_rate = mean;

  std::set<std::string> violating;
  for (auto& r : report.classes) {
    r.violation = r.included && r.rate > mean + kTieEpsilon;
    if (r.violation) violating.insert(r.label);
  }
  report.summary.violations = static_cast<int>(violating.size());
  report.summary.violation_rate =
      static_cast<double>(report.summary.violations) / report.summary.classes;

  for (const auto& p : ledger.pairs) {
    const bool inducing = std::any_of(p.diff.begin(), p.diff.end(), [&](const auto& kv) {
      return kv.second > 0 && violating.contains(kv.first);
    });
    if (inducing) report.error_inducing_inputs.push_back(p.mutant_id);
  }
  std::sort(report.error_inducing_inputs.begin(), report.error_inducing_inputs.end());
  report.summary.generated = static_cast<long long>(ledger.pairs.size());
  report.summary.error_inducing = static_cast<long long>(report.error_inducing_inputs.size());
  report.summary.fairness_error_rate =
      report.summary.generated == 0
          ? 0.0
          : static_cast<double>(report.summary.error_inducing) / report.summary.generated;
  return report;
}

nlohmann::json fairness_report_json(const FairnessReport& report) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : report.classes) {
    classes.push_back({{"class", c.label},
                       {"tot_count", c.tally.tot},
                       {"err_count", c.tally.err},
                       {"err_images", c.tally.err_images},
                       {"err_rate", c.rate},
                       {"included", c.included},
                       {"violation", c.violation}});
  }
  const auto& s = report.summary;
  return {{"classes", classes},
          {"summary",
           {{"classes", s.classes},
            {"violations", s.violations},
            {"violation_rate", s.violation_rate},
            {"mean_err_rate", s.mean_rate},
            {"generated", s.generated},
            {"error_inducing", s.error_inducing},
            {"fairness_error_rate", s.fairness_error_rate}}},
          {"error_inducing_inputs", report.error_inducing_inputs}};
}

FairnessReport fairness_report_from_json(const nlohmann::json& j) {
  FairnessReport r;
  for (const auto& c : j.at("classes")) {
    ClassResult cr;
    cr.label = c.at("class").get<std::string>();
    cr.tally = {c.at("tot_count").get<long long>(), c.at("err_count").get<long long>(),
                c.at("err_images").get<long long>()};
    cr.rate = c.at("err_rate").get<double>();
    cr.included = c.at("included").get<bool>();
    cr.violation = c.at("violation").get<bool>();
    r.classes.push_back(std::move(cr));
  }
  const auto& s = j.at("summary");
  r.summary.classes = s.at("classes").get<int>();
  r.summary.violations = s.at("violations").get<int>();
  r.summary.violation_rate = s.at("violation_rate").get<double>();
  r.summary.mean_rate = s.at("mean_err_rate").get<double>();
  r.summary.generated = s.at("generated").get<long long>();
  r.summary.error_inducing = s.at("error_inducing").get<long long>();
  r.summary.fairness_error_rate = s.at("fairness_error_rate").get<double>();
  r.error_inducing_inputs = j.at("error_inducing_inputs").get<std::vector<std::string>>();
  return r;
}

}  // namespace oodfair
