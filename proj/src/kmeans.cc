// src/kmeans.cc

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

#include "stab/kmeans.h"

#include <algorithm>
#include <limits>

#include "stab/base.h"
#include "stab/parallel.h"

namespace stab {
namespace {

constexpr std::size_t kChunk = 2048;

void AssignAll(const FeatureMatrix& points, const FeatureMatrix& centroids, int workers,
               std::vector<std::uint32_t>& labels, std::vector<double>& dists) {
  const std::size_t n_chunks = (points.rows + kChunk - 1) / kChunk;
  ParallelFor(n_chunks, workers, [&](std::size_t c) {
    const std::size_t end = std::min(points.rows, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      const auto x = points.row(i);
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t arg = 0;
      for (std::size_t j = 0; j < centroids.rows; ++j) {
        const double d = SquaredDistance(x, centroids.row(j));
        if (d < best) {
          best = d;
          arg = static_cast<std::uint32_t>(j);
        }
      }
      labels[i] = arg;
      dists[i] = best;
    }
  });
}

FeatureMatrix SeedPlusPlus(const FeatureMatrix& points, int k, std::uint64_t seed, int workers) {
  Rng rng(seed);
  FeatureMatrix centers(k, points.cols);
  std::size_t first = rng.UniformInt(points.rows);
  std::copy(points.row(first).begin(), points.row(first).end(), centers.row(0).begin());
  std::vector<double> d2(points.rows);
  const std::size_t n_chunks = (points.rows + kChunk - 1) / kChunk;
  for (int c = 1; c <= k; ++c) {
    const auto latest = centers.row(c - 1);
    ParallelFor(n_chunks, workers, [&](std::size_t chunk) {
      const std::size_t end = std::min(points.rows, (chunk + 1) * kChunk);
      for (std::size_t i = chunk * kChunk; i < end; ++i) {
        const double d = SquaredDistance(points.row(i), latest);
        d2[i] = c == 1 ? d : std::min(d2[i], d);
      }
    });
    if (c == k) break;
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.Uniform() * total;
      double acc = 0.0;
      pick = points.rows - 1;
      for (std::size_t i = 0; i < points.rows; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.UniformInt(points.rows);  // all points coincide with centers
    }
    std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
  }
  return centers;
}

}  // namespace

double SquaredDistance(std::span<const float> a, std::span<const float> b) {
  // Eight independent partial sums let the compiler vectorize without
  // reassociating floating point.
  float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) {
      const float d = a[i + l] - b[i + l];
      acc[l] += d * d;
    }
  }
  double total = 0.0;
  for (float v : acc) total += v;
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    total += d * d;
  }
  return total;
}

std::size_t NearestCentroid(const FeatureMatrix& centroids, std::span<const float> x) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j = 0; j < centroids.rows; ++j) {
    const double d = SquaredDistance(x, centroids.row(j));
    if (d < best) {
      best = d;
      arg = j;
    }
  }
  return arg;
}

double Inertia(const FeatureMatrix& points, const FeatureMatrix& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.rows; ++i) {
    total += SquaredDistance(points.row(i), centroids.row(NearestCentroid(centroids, points.row(i))));
  }
  return total;
}

KMeansResult FitKMeans(const FeatureMatrix& points, const KMeansOptions& options) {
  if (options.k < 1) throw Error("k-means: k must be >= 1");
  if (points.rows < static_cast<std::size_t>(options.k))
    throw Error("k-means: fewer points than clusters");
  if (options.max_iters < 1) throw Error("k-means: max_iters must be >= 1");

  KMeansResult result;
  result.centroids = SeedPlusPlus(points, options.k, options.seed, options.workers);
  FeatureMatrix& centroids = result.centroids;
  const std::size_t dim = points.cols;
  std::vector<std::uint32_t> labels(points.rows);
  std::vector<double> dists(points.rows);
  std::vector<double> sums(static_cast<std::size_t>(options.k) * dim);
  std::vector<std::size_t> counts(options.k);

  for (int it = 0; it < options.max_iters; ++it) {
    AssignAll(points, centroids, options.workers, labels, dists);
    double inertia = 0.0;
    for (double d : dists) inertia += d;
    result.iterations = it + 1;
    if (!result.inertia_history.empty()) {
      const double prev = result.inertia_history.back();
      // Lloyd steps never increase inertia; allow float rounding only.
      if (inertia > prev * (1.0 + 1e-6) + 1e-9)
        throw Error("k-means: inertia increased between iterations");
      result.inertia_history.push_back(inertia);
      if (prev == 0.0 || (prev - inertia) / prev < options.rel_tol) {
        result.converged = true;
        break;
      }
    } else {
      result.inertia_history.push_back(inertia);
    }

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < points.rows; ++i) {
      const auto x = points.row(i);
      double* s = sums.data() + labels[i] * dim;
      for (std::size_t d = 0; d < dim; ++d) s[d] += x[d];
      ++counts[labels[i]];
    }
    for (int c = 0; c < options.k; ++c) {
      auto row = centroids.row(c);
      if (counts[c] > 0) {
        for (std::size_t d = 0; d < dim; ++d)
          row[d] = static_cast<float>(sums[c * dim + d] / static_cast<double>(counts[c]));
        continue;
      }
      std::size_t far = 0;
      for (std::size_t i = 1; i < points.rows; ++i) {
        if (dists[i] > dists[far]) far = i;
      }
      std::copy(points.row(far).begin(), points.row(far).end(), row.begin());
      dists[far] = 0.0;  // the next empty cluster takes a different point
      ++result.empty_cluster_events;
    }
  }
  return result;
}

}  // namespace stab
