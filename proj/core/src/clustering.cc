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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "oodfair/errors.h"
#include "oodfair/rng.h"

namespace oodfair {
namespace {

double sq_dist(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

std::vector<Point> seed_plus_plus(const std::vector<Point>& pts, int k, Rng& rng) {
  const std::size_t n = pts.size();
  std::vector<Point> centres;
  std::vector<bool> used(n, false);
  std::size_t first = rng.index(n);
  centres.push_back(pts[first]);
  used[first] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(pts[i], centres[0]);

  while (static_cast<int>(centres.size()) < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding at the tail
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Fewer distinct points than k: take the lowest unused index.
      for (std::size_t i = 0; i < n; ++i) {
        if (!used[i]) {
          pick = i;
          break;
        }
      }
    }
    used[pick] = true;
    centres.push_back(pts[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(pts[i], centres.back()));
  }
  return centres;
}

double inertia_of(const std::vector<Point>& pts, const std::vector<int>& labels,
                  const std::vector<Point>& centres) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) s += sq_dist(pts[i], centres[labels[i]]);
  return s;
}

}  // namespace

KMeansResult kmeans(const std::vector<Point>& points, int k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const std::size_t n = points.size();
  if (k < 1) throw Error(ErrorCode::kConfig, "k must be positive");
  if (static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::kKTooLarge,
                "k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " points");
  }
  const std::size_t dim = points.front().size();
  Rng rng(seed);
  KMeansResult r;
  r.centroids = seed_plus_plus(points, k, rng);
  r.labels.assign(n, 0);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    r.iterations = iter + 1;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points[i], r.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points[i], r.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      r.labels[i] = best;
    }

    // Repair empty clusters one at a time.
    for (;;) {
      std::vector<int> sizes(k, 0);
      for (int l : r.labels) ++sizes[l];
      const auto empty = std::find(sizes.begin(), sizes.end(), 0);
      if (empty == sizes.end()) break;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[r.labels[i]] < 2) continue;
        const double d = sq_dist(points[i], r.centroids[r.labels[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      const int target = static_cast<int>(empty - sizes.begin());
      r.labels[far] = target;
      r.centroids[target] = points[far];
    }

    std::vector<Point> next(k, Point(dim, 0.0));
    std::vector<int> sizes(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[r.labels[i]];
      for (std::size_t d = 0; d < dim; ++d) next[r.labels[i]][d] += points[i][d];
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      for (std::size_t d = 0; d < dim; ++d) next[c][d] /= sizes[c];
      shift = std::max(shift, std::sqrt(sq_dist(next[c], r.centroids[c])));
    }
    r.centroids = std::move(next);
    r.inertia = inertia_of(points, r.labels, r.centroids);
    r.inertia_trace.push_back(r.inertia);
    if (shift < options.tolerance) break;
  }
  return r;
}

std::vector<std::string> ClusterAssignment::members(int cluster) const {
  std::vector<std::string> out;
  for (const auto& [id, c] : assignments) {
    if (c == cluster) out.push_back(id);
  }
  return out;
}

std::vector<Point> feature_vectors(const Dataset& dataset) {
  const auto universe = dataset.ordered_classes();
  std::vector<Point> pts;
  pts.reserve(dataset.scenes.size());
  for (const auto& s : dataset.scenes) {
    const auto counts = class_count_vector(s, universe);
    pts.emplace_back(counts.begin(), counts.end());
  }
  return pts;
}

ClusterAssignment cluster_dataset(const Dataset& dataset, int k, std::uint64_t seed,
                                  const KMeansOptions& options) {
  const auto pts = feature_vectors(dataset);
  if (pts.empty()) throw Error(ErrorCode::kEmptyDataset, "no scenes to cluster");
  KMeansResult r = kmeans(pts, k, seed, options);
  ClusterAssignment a;
  a.k = k;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a.assignments[dataset.scenes[i].scene_id] = r.labels[i];
  }
  a.centroids = std::move(r.centroids);
  a.inertia = r.inertia;
  a.inertia_trace = std::move(r.inertia_trace);
  return a;
}

double silhouette_score(const std::vector<Point>& points, const std::vector<int>& labels,
                        int k) {
  const std::size_t n = points.size();
  if (n == 0) return 0.0;
  std::vector<int> sizes(k, 0);
  for (int l : labels) ++sizes[l];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[labels[i]] < 2) continue;  // singleton contributes 0
    std::vector<double> sum(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sum[labels[j]] += std::sqrt(sq_dist(points[i], points[j]));
    }
    const double a = sum[labels[i]] / (sizes[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == labels[i] || sizes[c] == 0) continue;
      b = std::min(b, sum[c] / sizes[c]);
    }
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

int choose_k(const Dataset& dataset, int k_max, std::uint64_t seed) {
  const auto pts = feature_vectors(dataset);
  const int n = static_cast<int>(pts.size());
  if (n < 3) return 1;
  const std::set<Point> distinct(pts.begin(), pts.end());
  if (distinct.size() < 2) return 1;
  const int hi = std::min(k_max, n - 1);
  int best_k = 1;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 2; k <= hi; ++k) {
    const KMeansResult r = kmeans(pts, k, derive_seed(seed, "k=" + std::to_string(k)));
    const double s = silhouette_score(pts, r.labels, k);
    if (s > best) {
      best = s;
      best_k = k;
    }
  }
  return best_k;
}

nlohmann::json cluster_report_json(const ClusterAssignment& a) {
  nlohmann::json assign = nlohmann::json::object();
  for (const auto& [id, c] : a.assignments) assign[id] = c;
  return {{"k", a.k}, {"assignments", assign}, {"inertia", a.inertia},
          {"centroids", a.centroids}};
}

ClusterAssignment cluster_report_from_json(const nlohmann::json& j) {
  ClusterAssignment a;
  a.k = j.at("k").get<int>();
  for (const auto& [id, c] : j.at("assignments").items()) a.assignments[id] = c.get<int>();
  a.inertia = j.at("inertia").get<double>();
  if (j.contains("centroids")) a.centroids = j.at("centroids").get<std::vector<Point>>();
  return a;
}

}  // namespace oodfair
