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

#include "oodfair/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oodfair/errors.h"

namespace oodfair {

std::string_view mw_method_name(MwMethod method) {
  switch (method) {
    case MwMethod::kAuto: return "auto";
    case MwMethod::kExact: return "exact";
    case MwMethod::kNormalApprox: return "normal_approx";
  }
  return "unknown";
}

namespace {

// Ranks doubled so midranks stay integral.
std::vector<long long> doubled_midranks(const std::vector<double>& values,
                                        std::vector<long long>* tie_sizes) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<long long> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Ranks i+1 .. j+1 share (i + j + 2) / 2; doubled: i + j + 2.
    const auto r2 = static_cast<long long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r2;
    tie_sizes->push_back(static_cast<long long>(j - i + 1));
    i = j + 1;
  }
  return ranks;
}

// P(S <= s) and P(S >= s) for S = doubled rank sum of a random n1-subset.
std::pair<double, double> exact_tails(const std::vector<long long>& ranks, std::size_t n1,
                                      long long observed) {
  const std::size_t n = ranks.size();
  long long max_sum = 0;
  {
    std::vector<long long> sorted = ranks;
    std::sort(sorted.rbegin(), sorted.rend());
    for (std::size_t i = 0; i < n1; ++i) max_sum += sorted[i];
  }
  const std::size_t width = static_cast<std::size_t>(max_sum) + 1;
  // dp[j][s]: number of j-subsets of the ranks seen so far with doubled sum s.
  std::vector<std::vector<double>> dp(n1 + 1, std::vector<double>(width, 0.0));
  dp[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(ranks[i]);
    const std::size_t j_hi = std::min(i + 1, n1);
    const std::size_t j_lo = n1 + i + 1 > n ? n1 + i + 1 - n : 1;
    for (std::size_t j = j_hi; j >= j_lo && j >= 1; --j) {
      const auto& prev = dp[j - 1];
      auto& cur = dp[j];
      for (std::size_t s = width; s-- > r;) cur[s] += prev[s - r];
    }
  }
  double total = 0.0, le = 0.0, ge = 0.0;
  for (std::size_t s = 0; s < width; ++s) {
    const double c = dp[n1][s];
    total += c;
    if (static_cast<long long>(s) <= observed) le += c;
    if (static_cast<long long>(s) >= observed) ge += c;
  }
  return {le / total, ge / total};
}

}  // namespace

StatTestResult mann_whitney_u(std::span<const double> sample_a, std::span<const double> sample_b,
                              MwMethod method) {
  const std::size_t n1 = sample_a.size();
  const std::size_t n2 = sample_b.size();
  if (n1 == 0 || n2 == 0) throw Error(ErrorCode::kDegenerateSamples, "empty sample");

  std::vector<double> pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; })) {
    throw Error(ErrorCode::kDegenerateSamples, "all values identical");
  }

  std::vector<long long> ties;
  const std::vector<long long> ranks = doubled_midranks(pooled, &ties);
  long long r2_a = 0;
  for (std::size_t i = 0; i < n1; ++i) r2_a += ranks[i];

  const double nn = static_cast<double>(n1) * static_cast<double>(n2);
  StatTestResult result;
  result.u_statistic = r2_a / 2.0 - static_cast<double>(n1) * (n1 + 1) / 2.0;

  if (method == MwMethod::kAuto) {
    method = nn <= static_cast<double>(kMwExactLimit) ? MwMethod::kExact : MwMethod::kNormalApprox;
  }
  result.method = method;

  if (method == MwMethod::kExact) {
    const auto [le, ge] = exact_tails(ranks, n1, r2_a);
    result.p_value = std::min(1.0, 2.0 * std::min(le, ge));
    return result;
  }

  const double n = static_cast<double>(n1 + n2);
  double tie_term = 0.0;
  for (long long t : ties) tie_term += static_cast<double>(t * t * t - t);
  const double variance = nn / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  const double z = std::max(0.0, std::abs(result.u_statistic - nn / 2.0) - 0.5) / std::sqrt(variance);
  result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

nlohmann::json stat_test_json(const StatTestResult& r) {
  return {{"u_statistic", r.u_statistic},
          {"p_value", r.p_value},
          {"method", mw_method_name(r.method)}};
}

}  // namespace oodfair
