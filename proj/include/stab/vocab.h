// include/stab/vocab.h

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

#ifndef STAB_VOCAB_H_
#define STAB_VOCAB_H_

#include <cstdint>
#include <vector>

#include "stab/compress.h"

namespace stab {

inline constexpr std::uint64_t kDefaultTokenBudget = 500000;

// Frequencies of the first `budget` tokens of the stream, in stream order.
FrequencyTable BudgetedCounts(Corpus stream, std::size_t vocab_size, std::uint64_t budget);

struct Utilization {
  double percent = 0.0;             // 100 * distinct / |V|
  std::uint64_t tokens_observed = 0;
  std::uint64_t distinct = 0;
  bool under_budget = false;        // stream ran out before the budget
};

Utilization ComputeUtilization(Corpus stream, std::size_t vocab_size,
                               std::uint64_t budget = kDefaultTokenBudget);

// 100 * H(p) / log2 |V|, entropy in bits.
double EntropyScore(const FrequencyTable& freqs);

// Unsmoothed probabilities over all |V| ids for the first `budget` tokens.
std::vector<double> LanguageDistribution(Corpus stream, std::size_t vocab_size,
                                         std::uint64_t budget = kDefaultTokenBudget);

}  // namespace stab

#endif  // STAB_VOCAB_H_
