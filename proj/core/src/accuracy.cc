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

#include "oodfair/accuracy.h"

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "oodfair/rng.h"

namespace oodfair {

namespace {

int lookup(const ClassCounts& m, const std::string& label) {
  auto it = m.find(label);
  return it == m.end() ? 0 : it->second;
}

bool same_counts(const ClassCounts& a, const ClassCounts& b) {
  auto nonzero = [](const ClassCounts& m) {
    ClassCounts out;
    for (const auto& [k, v] : m) {
      if (v != 0) out.emplace(k, v);
    }
    return out;
  };
  return nonzero(a) == nonzero(b);
}

}  // namespace

void AccuracyTally::add(const ClassCounts& detected, const ClassCounts& expected_counts,
                        std::string_view skip_class) {
  for (const auto& [label, e] : expected_counts) {
    if (label == skip_class) continue;
    correct += std::min(lookup(detected, label), e);
    expected += e;
  }
}

ClassCounts restrict_counts(const ClassCounts& counts, const std::set<std::string>& considered) {
  ClassCounts out;
  for (const auto& [label, n] : counts) {
    if (considered.contains(label)) out.emplace(label, n);
  }
  return out;
}

ClassCounts ood_accuracy_oracle(const ClassCounts& source_gt,
                                const std::set<std::string>& considered,
                                const std::string& mutated_class, int insert_count) {
  ClassCounts out = restrict_counts(source_gt, considered);
  out[mutated_class] = lookup(source_gt, mutated_class) + insert_count;
  return out;
}

std::optional<std::size_t> pair_with_real(const ClassCounts& expected,
                                          std::span<const Scene> real_scenes,
                                          const std::set<std::string>& considered,
                                          std::uint64_t seed) {
  std::vector<std::size_t> matches;
  for (std::size_t i = 0; i < real_scenes.size(); ++i) {
    if (same_counts(restrict_counts(real_scenes[i].gt_counts, considered), expected)) {
      matches.push_back(i);
    }
  }
  if (matches.empty()) return std::nullopt;
  Rng rng(seed);
  return matches[rng.index(matches.size())];
}

double AccuracyComparison::ratio_pct() const {
  const double r = real.accuracy();
  return r == 0.0 ? 0.0 : 100.0 * ood.accuracy() / r;
}

double AccuracyComparison::improvement_pct() const {
  const double r = real.accuracy();
  return r == 0.0 ? 0.0 : 100.0 * (ood.accuracy() - r) / r;
}

AccuracyComparison accuracy_comparison(std::span<const AccuracyItem> items, bool non_mutated_only) {
  AccuracyComparison c;
  for (const auto& item : items) {
    const std::string_view skip =
        non_mutated_only ? std::string_view(item.mutated_class) : std::string_view();
    c.ood.add(item.ood_detected, item.ood_expected, skip);
    c.real.add(item.real_detected, item.real_expected, skip);
    ++c.pairs;
  }
  return c;
}

nlohmann::json accuracy_comparison_json(const AccuracyComparison& c) {
  return {{"pairs", c.pairs},
          {"ood_accuracy", c.ood.accuracy()},
          {"real_accuracy", c.real.accuracy()},
          {"ood_correct", c.ood.correct},
          {"ood_expected", c.ood.expected},
          {"real_correct", c.real.correct},
          {"real_expected", c.real.expected},
          {"relative_pct", c.ratio_pct()},
          {"improvement_pct", c.improvement_pct()}};
}

double image_error_rate(const ClassCounts& detected, const ClassCounts& expected,
                        std::string_view skip_class) {
  std::set<std::string> labels;
  for (const auto& [k, v] : detected) labels.insert(k);
  for (const auto& [k, v] : expected) labels.insert(k);
  long long err = 0, total = 0;
  for (const auto& label : labels) {
    if (label == skip_class) continue;
    err += std::abs(lookup(detected, label) - lookup(expected, label));
    total += lookup(expected, label);
  }
  return static_cast<double>(err) / static_cast<double>(std::max(1LL, total));
}

}  // namespace oodfair
