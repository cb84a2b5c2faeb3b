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

#ifndef OODFAIR_ACCURACY_H_
#define OODFAIR_ACCURACY_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "oodfair/scene.h"

namespace oodfair {

// Counting accuracy: sum over classes of min(detected, expected) divided by
// the sum of expected counts.
struct AccuracyTally {
  long long correct = 0;
  long long expected = 0;

  void add(const ClassCounts& detected, const ClassCounts& expected_counts,
           std::string_view skip_class = {});
  double accuracy() const {
    return expected == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(expected);
  }
};

ClassCounts restrict_counts(const ClassCounts& counts, const std::set<std::string>& considered);

// Expected counts on an insertion mutant: the source annotations restricted
// to `considered`, with the inserted objects added to the mutated class.
ClassCounts ood_accuracy_oracle(const ClassCounts& source_gt,
                                const std::set<std::string>& considered,
                                const std::string& mutated_class, int insert_count);

// Picks one real scene whose restricted annotations equal `expected` exactly;
// nullopt when none does. The choice is a seeded uniform draw.
std::optional<std::size_t> pair_with_real(const ClassCounts& expected,
                                          std::span<const Scene> real_scenes,
                                          const std::set<std::string>& considered,
                                          std::uint64_t seed);

struct AccuracyItem {
  std::string mutant_id;
  std::string mutated_class;
  ClassCounts ood_detected;
  ClassCounts ood_expected;
  ClassCounts real_detected;
  ClassCounts real_expected;
};

struct AccuracyComparison {
  long long pairs = 0;
  AccuracyTally ood;
  AccuracyTally real;

  // 100 * ood / real.
  double ratio_pct() const;
  // 100 * (ood - real) / real.
  double improvement_pct() const;
};

// With `non_mutated_only`, the mutated class is left out on both sides.
AccuracyComparison accuracy_comparison(std::span<const AccuracyItem> items,
                                       bool non_mutated_only = false);

nlohmann::json accuracy_comparison_json(const AccuracyComparison& c);

// Sum of |detected - expected| over classes, divided by the expected total
// (at least 1). `skip_class` is left out.
double image_error_rate(const ClassCounts& detected, const ClassCounts& expected,
                        std::string_view skip_class = {});

}  // namespace oodfair

#endif  // OODFAIR_ACCURACY_H_
