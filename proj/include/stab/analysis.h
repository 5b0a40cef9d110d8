// include/stab/analysis.h

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

#ifndef STAB_ANALYSIS_H_
#define STAB_ANALYSIS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stab/report.h"

namespace stab {

enum class TaskDirection { kHigherIsBetter, kLowerIsBetter };

struct DownstreamResults {
  std::string tokenizer_id;
  std::map<std::string, double> scores;
  std::map<std::string, TaskDirection> directions;

  void Validate() const;
};

// One JSON object per line:
// {"tokenizer_id":..,"scores":{task:value},"directions":{task:"lower"|"higher"}}
std::vector<DownstreamResults> ParseDownstream(std::string_view text,
                                               std::string_view origin = "downstream");
std::vector<DownstreamResults> LoadDownstream(const std::filesystem::path& path);

double CosineSimilarity(std::span<const double> a, std::span<const double> b);
// Base-2 Jensen-Shannon divergence in [0, 1] of two probability vectors.
double JensenShannonDivergence(std::span<const double> a, std::span<const double> b);

struct SimilarityMatrix {
  std::vector<std::string> languages;
  std::vector<std::vector<double>> cosine;
  std::vector<std::vector<double>> js_divergence;
};

// Distributions in caller order; at least two, equal dimension, none all-zero.
SimilarityMatrix ComputeSimilarity(
    const std::vector<std::pair<std::string, std::vector<double>>>& distributions);

// Normalized per-language distributions stored in a report, indexed by id.
std::vector<std::pair<std::string, std::vector<double>>> ReportDistributions(
    const MetricReport& report);

struct CorrelationCell {
  std::optional<double> value;
  std::size_t n_pairs = 0;
  std::string reason;  // set when the value is absent
};

inline constexpr std::string_view kCorrelationEstimator = "mean_sign_product";

struct CorrelationMatrix {
  std::vector<std::string> tokenizers;
  std::vector<std::string> dimensions;  // rows
  std::vector<std::string> tasks;       // columns
  std::vector<std::vector<CorrelationCell>> cells;

  const CorrelationCell& at(std::string_view dimension, std::string_view task) const;
};

// Sign of the relative change from b to a; zero when they are equal.
int RelativeSign(double a, double b);

CorrelationMatrix ComputeCorrelation(std::span<const MetricReport> reports,
                                     std::span<const DownstreamResults> downstream);

// Long form: dimension,task,correlation,n_pairs,estimator,note
std::string CorrelationCsv(const CorrelationMatrix& m);
// Wide form: header row of tasks, one row per dimension, empty where absent.
std::string CorrelationMatrixCsv(const CorrelationMatrix& m);
std::string SimilarityCsv(const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& matrix);

}  // namespace stab

#endif  // STAB_ANALYSIS_H_
