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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oodfair/errors.h"
#include "oodfair/rng.h"

namespace oodfair {
namespace {

// Brute force: U over every assignment of the pooled values to sample a.
double brute_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

double brute_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const double observed = brute_u(a, b);
  double le = 0, ge = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
    const double u = brute_u(x, y);
    total += 1;
    if (u <= observed + 1e-9) le += 1;
    if (u >= observed - 1e-9) ge += 1;
  }
  return std::min(1.0, 2.0 * std::min(le, ge) / total);
}

TEST(MannWhitneyTest, IdenticalSamples) {
  const std::vector<double> a = {1, 2, 3};
  const auto r = mann_whitney_u(a, a);
  EXPECT_DOUBLE_EQ(r.u_statistic, 4.5);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_EQ(r.method, MwMethod::kExact);
}

TEST(MannWhitneyTest, SeparatedSamples) {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {10, 20, 30};
  const auto r = mann_whitney_u(a, b);
  EXPECT_DOUBLE_EQ(r.u_statistic, 0.0);
  EXPECT_NEAR(brute_p(a, b), 0.1, 1e-12);
  EXPECT_NEAR(r.p_value, 0.1, 1e-12);
}

TEST(MannWhitneyTest, Degenerate) {
  const std::vector<double> five = {5};
  const std::vector<double> none;
  for (const auto& [x, y] : {std::pair{five, five}, std::pair{five, none}}) {
    try {
      mann_whitney_u(x, y);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegenerateSamples);
    }
  }
}

std::vector<double> draw(Rng& rng, int n, int levels) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.uniform_int(0, levels - 1)) / 4.0;
  return v;
}

TEST(MannWhitneyTest, ExactMatchesEnumerationWithTies) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n1 = static_cast<int>(rng.uniform_int(1, 6));
    const int n2 = static_cast<int>(rng.uniform_int(1, 6));
    const auto a = draw(rng, n1, 5);
    const auto b = draw(rng, n2, 5);
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; })) continue;
    const auto r = mann_whitney_u(a, b, MwMethod::kExact);
    EXPECT_DOUBLE_EQ(r.u_statistic, brute_u(a, b));
    EXPECT_NEAR(r.p_value, brute_p(a, b), 1e-9);
  }
}

TEST(MannWhitneyTest, SymmetricInSamples) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = draw(rng, static_cast<int>(rng.uniform_int(2, 15)), 8);
    const auto b = draw(rng, static_cast<int>(rng.uniform_int(2, 15)), 8);
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; })) continue;
    for (const auto m : {MwMethod::kExact, MwMethod::kNormalApprox}) {
      const auto ab = mann_whitney_u(a, b, m);
      const auto ba = mann_whitney_u(b, a, m);
      EXPECT_DOUBLE_EQ(ab.u_statistic + ba.u_statistic, static_cast<double>(a.size() * b.size()));
      EXPECT_NEAR(ab.p_value, ba.p_value, 1e-9);
      EXPECT_GT(ab.p_value, 0.0);
      EXPECT_LE(ab.p_value, 1.0);
    }
  }
}

TEST(MannWhitneyTest, AutoSwitchesToNormalForLargeSamples) {
  Rng rng(13);
  std::vector<double> a(150), b(150);
  for (auto& x : a) x = rng.uniform();
  for (auto& x : b) x = rng.uniform() + 0.1;
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.method, MwMethod::kNormalApprox);
  EXPECT_LT(r.p_value, 0.05);
}

}  // namespace
}  // namespace oodfair
