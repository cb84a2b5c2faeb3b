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

#include "oodfair/clustering.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>

#include "oodfair/errors.h"
#include "oodfair/rng.h"
#include "test_support.h"

namespace oodfair {
namespace {

using test::finish;
using test::object;

// One scene per count vector over classes a, b, c...
Dataset dataset_from_vectors(const std::vector<std::vector<int>>& vectors) {
  std::vector<Scene> scenes;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    Scene s;
    s.scene_id = "s" + std::to_string(i);
    s.width = 400;
    s.height = 100;
    int id = 0;
    for (std::size_t c = 0; c < vectors[i].size(); ++c) {
      for (int n = 0; n < vectors[i][c]; ++n, ++id) {
        s.objects.push_back(object("o" + std::to_string(id), std::string(1, static_cast<char>('a' + c)),
                                   {id * 10, 0, 5, 5}));
      }
    }
    finish(s);
    for (std::size_t c = 0; c < vectors[i].size(); ++c) s.gt_counts.try_emplace(std::string(1, static_cast<char>('a' + c)), 0);
    scenes.push_back(std::move(s));
  }
  return make_dataset(std::move(scenes));
}

double sq(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

// Oracle: exhaustive search over all labelings into exactly k non-empty groups.
std::vector<int> best_partition(const std::vector<Point>& pts, int k) {
  const std::size_t n = pts.size();
  std::vector<int> labels(n, 0), best;
  double best_sse = std::numeric_limits<double>::infinity();
  long long total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= k;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (std::size_t i = 0; i < n; ++i, c /= k) labels[i] = static_cast<int>(c % k);
    std::vector<Point> sum(static_cast<std::size_t>(k), Point(pts[0].size(), 0.0));
    std::vector<int> size(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++size[static_cast<std::size_t>(labels[i])];
      for (std::size_t d = 0; d < pts[i].size(); ++d) sum[static_cast<std::size_t>(labels[i])][d] += pts[i][d];
    }
    if (std::find(size.begin(), size.end(), 0) != size.end()) continue;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Point mean = sum[static_cast<std::size_t>(labels[i])];
      for (double& v : mean) v /= size[static_cast<std::size_t>(labels[i])];
      sse += sq(pts[i], mean);
    }
    if (sse < best_sse - 1e-9) {
      best_sse = sse;
      best = labels;
    }
  }
  return best;
}

// Oracle: silhouette from its definition, singletons scoring zero.
double silhouette(const std::vector<Point>& pts, const std::vector<int>& labels, int k) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      sum[static_cast<std::size_t>(labels[j])] += std::sqrt(sq(pts[i], pts[j]));
      ++count[static_cast<std::size_t>(labels[j])];
    }
    const auto own = static_cast<std::size_t>(labels[i]);
    if (count[own] == 0) continue;
    const double a = sum[own] / count[own];
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sum.size(); ++c) {
      if (c != own && count[c] > 0) b = std::min(b, sum[c] / count[c]);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(pts.size());
}

const std::vector<std::vector<int>> kSix = {{1, 0}, {2, 0}, {1, 1}, {9, 9}, {10, 8}, {9, 10}};

TEST(KMeansTest, PerfectlySeparated) {
  const std::vector<Point> pts = {{0, 0}, {0, 0}, {10, 10}, {10, 10}};
  const auto r = kmeans(pts, 2, 1);
  EXPECT_EQ(r.labels[0], r.labels[1]);
  EXPECT_EQ(r.labels[2], r.labels[3]);
  EXPECT_NE(r.labels[0], r.labels[2]);
  EXPECT_DOUBLE_EQ(r.inertia, 0.0);
  EXPECT_EQ(r.centroids[static_cast<std::size_t>(r.labels[0])], (Point{0, 0}));
  EXPECT_EQ(r.centroids[static_cast<std::size_t>(r.labels[2])], (Point{10, 10}));
}

TEST(KMeansTest, KEqualsNGivesSingletons) {
  const std::vector<Point> pts = {{0, 1}, {3, 3}, {7, 1}, {2, 9}, {5, 5}};
  const auto r = kmeans(pts, 5, 9);
  EXPECT_DOUBLE_EQ(r.inertia, 0.0);
  std::set<int> used(r.labels.begin(), r.labels.end());
  EXPECT_EQ(used.size(), 5u);
}

TEST(KMeansTest, SixSceneExampleMatchesExhaustiveOptimum) {
  const Dataset d = dataset_from_vectors(kSix);
  const auto pts = feature_vectors(d);
  const auto oracle = best_partition(pts, 2);
  // Oracle result: {0,1,2} vs {3,4,5}.
  ASSERT_EQ(oracle[0], oracle[1]);
  ASSERT_EQ(oracle[1], oracle[2]);
  ASSERT_EQ(oracle[3], oracle[4]);
  ASSERT_EQ(oracle[4], oracle[5]);
  ASSERT_NE(oracle[0], oracle[3]);

  const ClusterAssignment a = cluster_dataset(d, 2, 42);
  const int first = a.assignments.at("s0");
  const int second = a.assignments.at("s3");
  EXPECT_NE(first, second);
  for (const char* id : {"s1", "s2"}) EXPECT_EQ(a.assignments.at(id), first);
  for (const char* id : {"s4", "s5"}) EXPECT_EQ(a.assignments.at(id), second);
  const Point& c = a.centroids[static_cast<std::size_t>(second)];
  EXPECT_NEAR(c[0], 28.0 / 3.0, 1e-12);
  EXPECT_NEAR(c[1], 9.0, 1e-12);
}

TEST(KMeansTest, TooManyClusters) {
  const Dataset d = dataset_from_vectors({{1, 0}, {2, 0}});
  try {
    cluster_dataset(d, 3, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKTooLarge);
  }
}

// Properties over random data: inertia never rises between updates, every
// label is a nearest centroid, and a fixed seed replays exactly.
TEST(KMeansTest, RandomDataProperties) {
  Rng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(3, 40));
    const int dim = static_cast<int>(rng.uniform_int(1, 4));
    std::vector<Point> pts(static_cast<std::size_t>(n), Point(static_cast<std::size_t>(dim)));
    for (auto& p : pts) {
      for (auto& v : p) v = static_cast<double>(rng.uniform_int(0, 8));
    }
    const int k = static_cast<int>(rng.uniform_int(1, std::min(n, 5)));
    const auto r = kmeans(pts, k, static_cast<std::uint64_t>(trial));
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i) {
      EXPECT_LE(r.inertia_trace[i], r.inertia_trace[i - 1] + 1e-9);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double own = sq(pts[i], r.centroids[static_cast<std::size_t>(r.labels[i])]);
      for (const auto& c : r.centroids) EXPECT_LE(own, sq(pts[i], c) + 1e-9);
    }
    const auto again = kmeans(pts, k, static_cast<std::uint64_t>(trial));
    EXPECT_EQ(again.labels, r.labels);
    EXPECT_EQ(again.inertia, r.inertia);
  }
}

TEST(ChooseKTest, SixSceneExampleMatchesSilhouetteOracle) {
  const Dataset d = dataset_from_vectors(kSix);
  const auto pts = feature_vectors(d);
  int oracle_k = 0;
  double best = -2.0;
  for (int k = 2; k <= 4; ++k) {
    const double s = silhouette(pts, best_partition(pts, k), k);
    if (s > best + 1e-12) {
      best = s;
      oracle_k = k;
    }
  }
  ASSERT_EQ(oracle_k, 2);
  EXPECT_EQ(choose_k(d, 4, 7), 2);
}

TEST(ChooseKTest, SilhouetteAgreesWithDefinition) {
  const Dataset d = dataset_from_vectors(kSix);
  const auto pts = feature_vectors(d);
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  EXPECT_NEAR(silhouette_score(pts, labels, 2), silhouette(pts, labels, 2), 1e-12);
  const std::vector<int> three = {0, 0, 1, 2, 2, 2};
  EXPECT_NEAR(silhouette_score(pts, three, 3), silhouette(pts, three, 3), 1e-12);
}

TEST(ChooseKTest, DegenerateInputs) {
  EXPECT_EQ(choose_k(dataset_from_vectors({{1, 0}, {5, 5}}), 4, 0), 1);
  EXPECT_EQ(choose_k(dataset_from_vectors({{2, 2}, {2, 2}, {2, 2}, {2, 2}}), 4, 0), 1);
}

TEST(ClusterReportTest, JsonRoundTrip) {
  const Dataset d = dataset_from_vectors(kSix);
  const auto a = cluster_dataset(d, 2, 3);
  const auto back = cluster_report_from_json(cluster_report_json(a));
  EXPECT_EQ(back.k, a.k);
  EXPECT_EQ(back.assignments, a.assignments);
  EXPECT_EQ(back.centroids, a.centroids);
}

}  // namespace
}  // namespace oodfair
