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

#ifndef OODFAIR_REPORT_H_
#define OODFAIR_REPORT_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/accuracy.h"
#include "oodfair/fairness.h"
#include "oodfair/stats.h"

namespace oodfair {

// Fairness results for one (subject, op, distribution mode). `variants` is
// keyed by "gt", "exclusion" or "inclusion"; an empty optional means no class
// passed the count filter.
struct ReportRow {
  std::string subject;
  std::string dataset;
  std::string op;            // insert, delete, rotate or all
  std::string distribution;  // ood or id
  long long generated = 0;   // evaluated mutants
  std::map<std::string, std::optional<FairnessReport>> variants;
};

struct MwComparison {
  std::string subject;
  std::string comparison;  // original_vs_ood or id_vs_ood
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  std::optional<StatTestResult> result;  // empty: degenerate samples, p = 1
};

struct AccuracyRow {
  std::string subject;
  std::string variant;  // ood_vs_real or non_mutated_error_inducing
  long long unmatched = 0;
  AccuracyComparison comparison;
};

struct AnalysisResult {
  OracleMode oracle = OracleMode::kMt;
  std::vector<ReportRow> rows;
  std::vector<MwComparison> mann_whitney;
  std::vector<AccuracyRow> accuracy;

  nlohmann::json to_json() const;
  static AnalysisResult from_json(const nlohmann::json& j);
};

std::string summary_csv(const AnalysisResult& analysis);
// Rows sorted by Err_c descending, then label.
std::string per_class_csv(const FairnessReport& report);
std::string per_class_file_name(const ReportRow& row, const std::string& variant);

// Writes summary.csv, summary.json, per-class CSVs, mann_whitney.json and
// accuracy.json into `dir`. `timing`, when not null, goes to timing.json.
void emit_reports(const AnalysisResult& analysis, const std::filesystem::path& dir,
                  const nlohmann::json& timing = nullptr);

}  // namespace oodfair

#endif  // OODFAIR_REPORT_H_
