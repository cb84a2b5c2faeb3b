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

#ifndef OODFAIR_CLUSTERING_H_
#define OODFAIR_CLUSTERING_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodfair/scene.h"

namespace oodfair {

using Point = std::vector<double>;

struct KMeansOptions {
  double tolerance = 1e-6;  // on the largest centroid displacement
  int max_iterations = 300;
};

struct KMeansResult {
  std::vector<int> labels;       // cluster index per point
  std::vector<Point> centroids;  // mean of each cluster's members
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // inertia after every update step
  int iterations = 0;
};

// k-means++ seeding followed by Lloyd iterations. Ties between equally near
// centroids go to the lower index; an emptied cluster is reseeded with the
// point farthest from its centroid.
KMeansResult kmeans(const std::vector<Point>& points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

struct ClusterAssignment {
  int k = 1;
  std::map<std::string, int> assignments;  // scene_id -> cluster
  std::vector<Point> centroids;
  double inertia = 0.0;
  std::vector<double> inertia_trace;

  std::vector<std::string> members(int cluster) const;
};

// Feature vectors are class_count_vector over the ordered class universe.
std::vector<Point> feature_vectors(const Dataset& dataset);

// Throws KTooLarge when k exceeds the number of scenes.
ClusterAssignment cluster_dataset(const Dataset& dataset, int k, std::uint64_t seed,
                                  const KMeansOptions& options = {});

// Mean silhouette coefficient; singletons score 0.
double silhouette_score(const std::vector<Point>& points, const std::vector<int>& labels,
                        int k);

// argmax of the silhouette over k in [2, min(k_max, n - 1)], smallest k on
// ties. Falls back to 1 for fewer than three scenes or fewer than two
// distinct feature vectors.
int choose_k(const Dataset& dataset, int k_max, std::uint64_t seed);

nlohmann::json cluster_report_json(const ClusterAssignment& assignment);
ClusterAssignment cluster_report_from_json(const nlohmann::json& j);

}  // namespace oodfair

#endif  // OODFAIR_CLUSTERING_H_
