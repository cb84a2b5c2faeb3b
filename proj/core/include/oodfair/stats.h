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

#ifndef OODFAIR_STATS_H_
#define OODFAIR_STATS_H_

#include <span>
#include <string_view>

#include <nlohmann/json.hpp>

namespace oodfair {

enum class MwMethod { kAuto, kExact, kNormalApprox };

std::string_view mw_method_name(MwMethod method);

struct StatTestResult {
  double u_statistic = 0.0;  // U of sample_a, in [0, n1 * n2]
  double p_value = 1.0;      // two-sided
  MwMethod method = MwMethod::kExact;
};

// Largest n1 * n2 for which kAuto enumerates the exact null distribution.
inline constexpr long long kMwExactLimit = 10000;

// Two-sided Mann-Whitney U test with midranks for ties. The exact method
// enumerates the permutation distribution of the (tied) rank sum; the normal
// approximation uses the tie-corrected variance and a continuity correction.
// Throws DegenerateSamples when a sample is empty or every value is equal.
StatTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                              MwMethod method = MwMethod::kAuto);

nlohmann::json stat_test_json(const StatTestResult& result);

}  // namespace oodfair

#endif  // OODFAIR_STATS_H_
