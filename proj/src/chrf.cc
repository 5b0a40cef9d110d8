// src/chrf.cc

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

#include "stab/chrf.h"

#include <algorithm>

namespace stab {
namespace {

using Gram = std::span<const TokenId>;

bool Less(const Gram& a, const Gram& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}
bool Same(const Gram& a, const Gram& b) { return std::equal(a.begin(), a.end(), b.begin(), b.end()); }

std::vector<Gram> SortedGrams(std::span<const TokenId> seq, std::size_t n) {
  std::vector<Gram> grams;
  if (seq.size() < n) return grams;
  grams.reserve(seq.size() - n + 1);
  for (std::size_t i = 0; i + n <= seq.size(); ++i) grams.push_back(seq.subspan(i, n));
  std::sort(grams.begin(), grams.end(), Less);
  return grams;
}

// Sum over distinct n-grams of min(count in a, count in b).
std::int64_t ClippedMatches(const std::vector<Gram>& a, const std::vector<Gram>& b) {
  std::int64_t matched = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (Less(a[i], b[j])) {
      ++i;
    } else if (Less(b[j], a[i])) {
      ++j;
    } else {
      std::size_t ni = i, nj = j;
      while (ni < a.size() && Same(a[ni], a[i])) ++ni;
      while (nj < b.size() && Same(b[nj], b[j])) ++nj;
      matched += static_cast<std::int64_t>(std::min(ni - i, nj - j));
      i = ni;
      j = nj;
    }
  }
  return matched;
}

}  // namespace

void ChrfConfig::Validate() const {
  if (max_order < 1) throw Error("chrF: max_order must be >= 1");
  if (!(beta > 0.0)) throw Error("chrF: beta must be > 0");
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  if (other.matched.size() != matched.size()) throw Error("chrF: mismatched n-gram orders");
  for (std::size_t n = 0; n < matched.size(); ++n) {
    matched[n] += other.matched[n];
    hyp_ngrams[n] += other.hyp_ngrams[n];
    ref_ngrams[n] += other.ref_ngrams[n];
  }
  return *this;
}

ChrfStats ComputeChrfStats(std::span<const TokenId> hyp, std::span<const TokenId> ref,
                           int max_order) {
  ChrfStats stats(max_order);
  for (int n = 1; n <= max_order; ++n) {
    const auto h = SortedGrams(hyp, n);
    const auto r = SortedGrams(ref, n);
    stats.hyp_ngrams[n - 1] = static_cast<std::int64_t>(h.size());
    stats.ref_ngrams[n - 1] = static_cast<std::int64_t>(r.size());
    stats.matched[n - 1] = ClippedMatches(h, r);
  }
  return stats;
}

double ChrfFromStats(const ChrfStats& stats, double beta) {
  double precision = 0.0, recall = 0.0;
  int orders = 0;
  for (std::size_t n = 0; n < stats.matched.size(); ++n) {
    const auto h = stats.hyp_ngrams[n];
    const auto r = stats.ref_ngrams[n];
    if (h == 0 && r == 0) continue;
    precision += h > 0 ? static_cast<double>(stats.matched[n]) / h : 0.0;
    recall += r > 0 ? static_cast<double>(stats.matched[n]) / r : 0.0;
    ++orders;
  }
  if (orders == 0) return 100.0;
  precision /= orders;
  recall /= orders;
  if (precision == 0.0 && recall == 0.0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

double Chrf(std::span<const TokenId> hyp, std::span<const TokenId> ref, const ChrfConfig& cfg) {
  cfg.Validate();
  return ChrfFromStats(ComputeChrfStats(hyp, ref, cfg.max_order), cfg.beta);
}

}  // namespace stab
