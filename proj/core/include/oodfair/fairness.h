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

#ifndef OODFAIR_FAIRNESS_H_
#define OODFAIR_FAIRNESS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/detection.h"
#include "oodfair/scene.h"

namespace oodfair {

enum class OracleMode { kGt, kMt };
enum class ErrType { kExclusion, kInclusion };

std::string_view oracle_mode_name(OracleMode mode);
std::optional<OracleMode> parse_oracle_mode(std::string_view name);
std::string_view err_type_name(ErrType type);
std::optional<ErrType> parse_err_type(std::string_view name);

// Ground-truth reference for one original scene: per class, the largest count
// reported by the annotations or by any subject.
struct OracleReference {
  std::string scene_id;
  ClassCounts gt_ref;

  int at(std::string_view label) const;
  bool operator==(const OracleReference&) const = default;
};

OracleReference build_reference(const std::string& scene_id, const ClassCounts& gt_counts,
                                std::span<const DetectionRecord> subject_records);

using ClassErrors = std::map<std::string, int>;

// |ood - ref| - |orig - ref| for every class except the mutated one. Negative
// values mean the mutant was detected closer to the reference.
ClassErrors gt_errors(const DetectionRecord& orig, const DetectionRecord& ood,
                      const OracleReference& ref, std::string_view mutated_class);

// Count increases (inclusion) or decreases (exclusion) between original and
// mutant detections, mutated class excluded. Never negative.
ClassErrors mt_errors(const DetectionRecord& orig, const DetectionRecord& ood,
                      std::string_view mutated_class, ErrType type);

// One subject's detections on an original scene and one of its mutants.
struct EvaluatedPair {
  std::string mutant_id;
  std::string mutated_class;
  DetectionRecord original;
  DetectionRecord mutant;
  std::optional<OracleReference> reference;  // required in GT mode
};

struct ClassTally {
  long long tot = 0;
  long long err = 0;
  long long err_images = 0;

  bool operator==(const ClassTally&) const = default;
};

struct PairErrors {
  std::string mutant_id;
  ClassErrors diff;

  bool operator==(const PairErrors&) const = default;
};

// Error totals for one (subject, op) scope, plus the per-pair breakdown used
// to identify error-inducing inputs.
struct ErrorLedger {
  std::map<std::string, ClassTally> classes;
  std::vector<PairErrors> pairs;

  void merge(const ErrorLedger& other);
  bool empty() const { return pairs.empty(); }
  bool operator==(const ErrorLedger&) const = default;
};

// Tot grows by the reference count of each class (reference counts in GT
// mode, original detections in MT mode).
ErrorLedger accumulate(std::span<const EvaluatedPair> pairs, OracleMode mode,
                       ErrType type = ErrType::kExclusion);

struct ClassResult {
  std::string label;
  ClassTally tally;
  double rate = 0.0;      // err / tot; meaningful when included
  bool included = false;  // tot > 0 and passes the minimum-count filter
  bool violation = false;
};

struct FairnessSummary {
  int classes = 0;
  int violations = 0;
  double violation_rate = 0.0;
  long long generated = 0;
  long long error_inducing = 0;
  double fairness_error_rate = 0.0;
  double mean_rate = 0.0;
};

struct FairnessReport {
  std::vector<ClassResult> classes;  // by label
  FairnessSummary summary;
  std::vector<std::string> error_inducing_inputs;  // sorted mutant ids
};

// A class violates when its rate is strictly above the mean of the included
// classes. Throws EmptyAfterFiltering when no class is included.
FairnessReport detect_violations(const ErrorLedger& ledger, int min_class_count = 10,
                                 bool filtering_enabled = true);

nlohmann::json fairness_report_json(const FairnessReport& report);
FairnessReport fairness_report_from_json(const nlohmann::json& j);

}  // namespace oodfair

#endif  // OODFAIR_FAIRNESS_H_
