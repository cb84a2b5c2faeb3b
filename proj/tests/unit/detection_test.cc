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

#include "oodfair/detection.h"

#include <gtest/gtest.h>

#include <cmath>

#include "oodfair/errors.h"
#include "test_support.h"

namespace oodfair {
namespace {

using test::finish;
using test::object;
using test::road_scene;

Scene mixed(const std::string& id) {
  Scene s = road_scene(id, 400, 200, 80);
  s.objects.push_back(object("d0", "dog", {0, 150, 20, 15}, 0.0, 1));
  s.objects.push_back(object("d1", "dog", {40, 150, 20, 15}, 0.0, 1));
  s.objects.push_back(object("c0", "car", {100, 130, 60, 30}, 0.0, 1));
  s.objects.push_back(object("p0", "person", {200, 120, 15, 40}, 0.0, 1));
  return finish(s);
}

// Smallest and largest k with two-sided binomial tail mass above alpha / 2,
// computed from the log pmf.
std::pair<int, int> binomial_bounds(int n, double p, double alpha) {
  std::vector<double> pmf(n + 1);
  for (int k = 0; k <= n; ++k) {
    pmf[k] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                      k * std::log(p) + (n - k) * std::log1p(-p));
  }
  int lo = 0;
  double acc = 0;
  while (acc + pmf[lo] < alpha / 2) acc += pmf[lo++];
  int hi = n;
  acc = 0;
  while (acc + pmf[hi] < alpha / 2) acc += pmf[hi--];
  return {lo, hi};
}

TEST(SimulatedDetectorTest, PerfectDetectorMatchesVisibleInstances) {
  SimulatedDetector d(SimulatedDetectorConfig{});
  const Scene s = mixed("m");
  const DetectionRecord r = d.detect(s);
  EXPECT_EQ(r.counts, s.instance_counts());
  EXPECT_EQ(r.scene_id, "m");
  EXPECT_EQ(r.subject_id, "sim");
}

TEST(SimulatedDetectorTest, ZeroRecallClass) {
  SimulatedDetectorConfig c;
  c.per_class_recall["dog"] = 0.0;
  const DetectionRecord r = SimulatedDetector(c).detect(mixed("m"));
  EXPECT_EQ(r.count("dog"), 0);
  EXPECT_EQ(r.count("car"), 1);
  EXPECT_EQ(r.count("person"), 1);
}

TEST(SimulatedDetectorTest, HalfRecallIsBinomial) {
  const auto [lo, hi] = binomial_bounds(1000, 0.5, 1e-6);
  // Frozen from the oracle above.
  ASSERT_EQ(lo, 423);
  ASSERT_EQ(hi, 577);
  SimulatedDetectorConfig c;
  c.per_class_recall["car"] = 0.5;
  Scene s = road_scene("one", 200, 100, 50);
  s.objects.push_back(object("c", "car", {10, 60, 40, 20}));
  finish(s);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    c.seed = seed;
    const SimulatedDetector d(c);
    const int n = d.detect(s).count("car");
    EXPECT_EQ(d.detect(s).count("car"), n) << "replay differs at seed " << seed;
    hits += n;
  }
  EXPECT_GE(hits, lo);
  EXPECT_LE(hits, hi);
}

TEST(SimulatedDetectorTest, HiddenObjectsAreMissed) {
  Scene s = road_scene("occ", 200, 100, 50);
  s.objects.push_back(object("back", "car", {10, 60, 40, 20}, 0.0, 1));
  s.objects.push_back(object("front", "truck", {5, 55, 60, 30}, 0.0, 2));
  finish(s);
  const auto vis = visible_fractions(s);
  EXPECT_DOUBLE_EQ(vis[0], 0.0);
  EXPECT_DOUBLE_EQ(vis[1], 1.0);
  const auto r = SimulatedDetector(SimulatedDetectorConfig{}).detect(s);
  EXPECT_EQ(r.count("car"), 0);
  EXPECT_EQ(r.count("truck"), 1);
}

TEST(SimulatedDetectorTest, CrowdingLowersRecall) {
  SimulatedDetectorConfig c;
  c.crowding_penalty = 0.5;
  c.crowding_threshold = 2;
  Scene s = road_scene("crowd", 800, 100, 50);
  for (int i = 0; i < 8; ++i) s.objects.push_back(object("c" + std::to_string(i), "car", {i * 100, 60, 40, 20}));
  finish(s);
  int found = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    c.seed = seed;
    found += SimulatedDetector(c).detect(s).count("car");
  }
  // Recall 0.5^6 over 1600 instances.
  EXPECT_LT(found, 100);
  s.objects.resize(2);
  finish(s);
  EXPECT_EQ(SimulatedDetector(c).detect(s).count("car"), 2);
}

TEST(SimulatedDetectorTest, ConfusionRelabels) {
  SimulatedDetectorConfig c;
  c.confusion_pairs.push_back({"dog", "cat", 1.0});
  const auto r = SimulatedDetector(c).detect(mixed("m"));
  EXPECT_EQ(r.count("dog"), 0);
  EXPECT_EQ(r.count("cat"), 2);
}

TEST(SimulatedDetectorTest, DigestTracksConfig) {
  SimulatedDetectorConfig a;
  SimulatedDetectorConfig b;
  EXPECT_EQ(SimulatedDetector(a).config_digest(), SimulatedDetector(b).config_digest());
  b.per_class_recall["car"] = 0.9;
  EXPECT_NE(SimulatedDetector(a).config_digest(), SimulatedDetector(b).config_digest());
  EXPECT_EQ(SimulatedDetectorConfig::from_json(b.to_json()).to_json(), b.to_json());
}

TEST(SimulatedDetectorTest, RejectsBadConfig) {
  SimulatedDetectorConfig c;
  c.per_class_recall["car"] = 1.5;
  EXPECT_THROW(c.validate(), Error);
}

TEST(DetectionRecordTest, JsonRoundTrip) {
  const DetectionRecord r{"s", "sim", {{"car", 2}, {"person", 1}}};
  EXPECT_EQ(detection_from_json(detection_to_json(r)), r);
}

TEST(Sha256Test, KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace oodfair
