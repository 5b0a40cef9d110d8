// include/stab/kmeans.h

// Copyright 2026  The stab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef STAB_KMEANS_H_
#define STAB_KMEANS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "stab/features.h"

namespace stab {

struct KMeansOptions {
  int k = 64;
  std::uint64_t seed = 0;
  int max_iters = 50;
  double rel_tol = 1e-4;
  int workers = 1;
};

struct KMeansResult {
  FeatureMatrix centroids;
  std::vector<double> inertia_history;  // one entry per assignment pass
  int iterations = 0;
  int empty_cluster_events = 0;
  bool converged = false;
};

// k-means++ seeding then Lloyd iterations until the relative inertia change
// drops below rel_tol or max_iters passes. An empty cluster is re-seeded from
// the point farthest from its centroid (ties: lowest point index).
KMeansResult FitKMeans(const FeatureMatrix& points, const KMeansOptions& options);

// Index of the nearest centroid by squared Euclidean distance; exact ties go
// to the lowest index.
std::size_t NearestCentroid(const FeatureMatrix& centroids, std::span<const float> x);

double SquaredDistance(std::span<const float> a, std::span<const float> b);

double Inertia(const FeatureMatrix& points, const FeatureMatrix& centroids);

}  // namespace stab

#endif  // STAB_KMEANS_H_
