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

#include "oodfair/report.h"

#include <algorithm>
#include <cstdio>

#include "oodfair/scene_io.h"

namespace oodfair {

namespace {

using json = nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const FairnessReport* variant(const ReportRow& row, const std::string& key) {
  auto it = row.variants.find(key);
  return it == row.variants.end() || !it->second ? nullptr : &*it->second;
}

}  // namespace

json AnalysisResult::to_json() const {
  json rows_j = json::array();
  for (const auto& r : rows) {
    json variants = json::object();
    for (const auto& [k, v] : r.variants) variants[k] = v ? fairness_report_json(*v) : json(nullptr);
    rows_j.push_back({{"subject", r.subject},
                      {"dataset", r.dataset},
                      {"op", r.op},
                      {"distribution", r.distribution},
                      {"generated", r.generated},
                      {"variants", variants}});
  }
  json mw = json::array();
  for (const auto& m : mann_whitney) {
    json e = {{"subject", m.subject}, {"comparison", m.comparison}, {"n_a", m.n_a},
              {"n_b", m.n_b},         {"mean_a", m.mean_a},         {"mean_b", m.mean_b}};
    if (m.result) {
      e["test"] = stat_test_json(*m.result);
    } else {
      e["test"] = {{"degenerate", true}, {"p_value", 1.0}};
    }
    mw.push_back(e);
  }
  json acc = json::array();
  for (const auto& a : accuracy) {
    json e = accuracy_comparison_json(a.comparison);
    e["subject"] = a.subject;
    e["variant"] = a.variant;
    e["unmatched"] = a.unmatched;
    acc.push_back(e);
  }
  return {{"oracle", oracle_mode_name(oracle)}, {"rows", rows_j}, {"mann_whitney", mw},
          {"accuracy", acc}};
}

AnalysisResult AnalysisResult::from_json(const json& j) {
  AnalysisResult a;
  a.oracle = parse_oracle_mode(j.at("oracle").get<std::string>()).value_or(OracleMode::kMt);
  for (const auto& r : j.at("rows")) {
    ReportRow row;
    row.subject = r.at("subject").get<std::string>();
    row.dataset = r.at("dataset").get<std::string>();
    row.op = r.at("op").get<std::string>();
    row.distribution = r.at("distribution").get<std::string>();
    row.generated = r.at("generated").get<long long>();
    for (const auto& [k, v] : r.at("variants").items()) {
      row.variants[k] = v.is_null() ? std::nullopt
                                    : std::optional<FairnessReport>(fairness_report_from_json(v));
    }
    a.rows.push_back(std::move(row));
  }
  for (const auto& m : j.at("mann_whitney")) {
    MwComparison c;
    c.subject = m.at("subject").get<std::string>();
    c.comparison = m.at("comparison").get<std::string>();
    c.n_a = m.at("n_a").get<std::size_t>();
    c.n_b = m.at("n_b").get<std::size_t>();
    c.mean_a = m.at("mean_a").get<double>();
    c.mean_b = m.at("mean_b").get<double>();
    const auto& t = m.at("test");
    if (!t.value("degenerate", false)) {
      StatTestResult s;
      s.u_statistic = t.at("u_statistic").get<double>();
      s.p_value = t.at("p_value").get<double>();
      s.method = t.at("method").get<std::string>() == "exact" ? MwMethod::kExact
                                                              : MwMethod::kNormalApprox;
      c.result = s;
    }
    a.mann_whitney.push_back(std::move(c));
  }
  for (const auto& e : j.at("accuracy")) {
    AccuracyRow r;
    r.subject = e.at("subject").get<std::string>();
    r.variant = e.at("variant").get<std::string>();
    r.unmatched = e.at("unmatched").get<long long>();
    r.comparison.pairs = e.at("pairs").get<long long>();
    r.comparison.ood = {e.at("ood_correct").get<long long>(), e.at("ood_expected").get<long long>()};
    r.comparison.real = {e.at("real_correct").get<long long>(),
                         e.at("real_expected").get<long long>()};
    a.accuracy.push_back(std::move(r));
  }
  return a;
}

std::string summary_csv(const AnalysisResult& analysis) {
  std::string out;
  if (analysis.oracle == OracleMode::kGt) {
    out = "Subject,Dataset,MutationOp,Distribution,#Classes,#Violations,ViolationRate,"
          "#ErrorInputs,#GenInputs,FairnessErrorRate\n";
    for (const auto& r : analysis.rows) {
      const FairnessReport* g = variant(r, "gt");
      out += csv_field(r.subject) + "," + csv_field(r.dataset) + "," + r.op + "," + r.distribution;
      if (g) {
        const auto& s = g->summary;
        out += "," + std::to_string(s.classes) + "," + std::to_string(s.violations) + "," +
               fmt(s.violation_rate) + "," + std::to_string(s.error_inducing) + "," +
               std::to_string(r.generated) + "," + fmt(s.fairness_error_rate);
      } else {
        out += ",0,0," + fmt(0) + ",0," + std::to_string(r.generated) + "," + fmt(0);
      }
      out += "\n";
    }
    return out;
  }
  out = "Subject,Dataset,MutationOp,Distribution,#Classes,#Violations_Ex,#Violations_Inc,"
        "ViolationRate_Ex,ViolationRate_Inc,#ErrorInputs_Ex,#ErrorInputs_Inc,#GenInputs,"
        "FairnessErrorRate_Ex,FairnessErrorRate_Inc\n";
  for (const auto& r : analysis.rows) {
    const FairnessReport* ex = variant(r, "exclusion");
    const FairnessReport* inc = variant(r, "inclusion");
    const bool has_ex = r.variants.contains("exclusion");
    const bool has_inc = r.variants.contains("inclusion");
    // Blank cells: err type not requested. Zeros: requested, nothing passed the filter.
    auto cell = [&](bool requested, const FairnessReport* f, auto get) -> std::string {
      if (!requested) return "";
      return f ? get(*f) : get(FairnessReport{});
    };
    const FairnessReport* any = ex ? ex : inc;
    out += csv_field(r.subject) + "," + csv_field(r.dataset) + "," + r.op + "," + r.distribution +
           "," + std::to_string(any ? any->summary.classes : 0);
    auto viol = [](const FairnessReport& f) { return std::to_string(f.summary.violations); };
    auto vrate = [](const FairnessReport& f) { return fmt(f.summary.violation_rate); };
    auto errs = [](const FairnessReport& f) { return std::to_string(f.summary.error_inducing); };
    auto frate = [](const FairnessReport& f) { return fmt(f.summary.fairness_error_rate); };
    out += "," + cell(has_ex, ex, viol) + "," + cell(has_inc, inc, viol);
    out += "," + cell(has_ex, ex, vrate) + "," + cell(has_inc, inc, vrate);
    out += "," + cell(has_ex, ex, errs) + "," + cell(has_inc, inc, errs);
    out += "," + std::to_string(r.generated);
    out += "," + cell(has_ex, ex, frate) + "," + cell(has_inc, inc, frate) + "\n";
  }
  return out;
}

std::string per_class_csv(const FairnessReport& report) {
  std::vector<const ClassResult*> rows;
  for (const auto& c : report.classes) rows.push_back(&c);
  std::sort(rows.begin(), rows.end(), [](const ClassResult* a, const ClassResult* b) {
    if (a->rate != b->rate) return a->rate > b->rate;
    return a->label < b->label;
  });
  std::string out = "Class,Tot_Count,Err_Count,Err_Images,Err_c,Included,Violation\n";
  for (const auto* c : rows) {
    out += csv_field(c->label) + "," + std::to_string(c->tally.tot) + "," +
           std::to_string(c->tally.err) + "," + std::to_string(c->tally.err_images) + "," +
           fmt(c->rate) + "," + (c->included ? "1" : "0") + "," + (c->violation ? "1" : "0") +
           "\n";
  }
  return out;
}

std::string per_class_file_name(const ReportRow& row, const std::string& v) {
  return "per_class_" + file_stem_for(row.subject) + "_" + row.op + "_" + row.distribution + "_" +
         v + ".csv";
}

void emit_reports(const AnalysisResult& analysis, const std::filesystem::path& dir,
                  const json& timing) {
  const json full = analysis.to_json();
  write_file_atomic(dir / "summary.csv", summary_csv(analysis));

  json summary = json::array();
  for (const auto& r : full["rows"]) {
    json row = {{"subject", r["subject"]}, {"dataset", r["dataset"]}, {"op", r["op"]},
                {"distribution", r["distribution"]}, {"generated", r["generated"]}};
    for (const auto& [k, v] : r["variants"].items()) {
      row[k] = v.is_null() ? json(nullptr) : v["summary"];
    }
    summary.push_back(row);
  }
  write_file_atomic(dir / "summary.json",
                    json{{"oracle", full["oracle"]}, {"rows", summary}}.dump(2) + "\n");

  for (const auto& r : analysis.rows) {
    for (const auto& [k, v] : r.variants) {
      if (v) write_file_atomic(dir / per_class_file_name(r, k), per_class_csv(*v));
    }
  }
  write_file_atomic(dir / "mann_whitney.json", full["mann_whitney"].dump(2) + "\n");
  write_file_atomic(dir / "accuracy.json", full["accuracy"].dump(2) + "\n");
  if (!timing.is_null()) write_file_atomic(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace oodfair
