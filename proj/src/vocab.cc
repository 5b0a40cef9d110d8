// src/vocab.cc

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

#include "stab/vocab.h"

#include <cmath>

namespace stab {

FrequencyTable BudgetedCounts(Corpus stream, std::size_t vocab_size, std::uint64_t budget) {
  FrequencyTable t(vocab_size);
  for (const auto& seq : stream) {
    for (TokenId id : seq) {
      if (t.total >= budget) return t;
      if (id >= vocab_size) throw Error("token id " + std::to_string(id) + " outside vocabulary");
      t.Add(id);
    }
  }
  return t;
}

Utilization ComputeUtilization(Corpus stream, std::size_t vocab_size, std::uint64_t budget) {
  if (vocab_size == 0) throw Error("utilization: vocabulary size must be positive");
  const FrequencyTable t = BudgetedCounts(stream, vocab_size, budget);
  Utilization u;
  u.tokens_observed = t.total;
  u.distinct = t.counts.size();
  u.percent = 100.0 * static_cast<double>(u.distinct) / static_cast<double>(vocab_size);
  u.under_budget = t.total < budget;
  return u;
}

double EntropyScore(const FrequencyTable& freqs) {
  if (freqs.total == 0) throw Error("entropy: empty frequency table");
  if (freqs.vocab_size < 2) throw Error("entropy: vocabulary size must be >= 2");
  double h = 0.0;
  const double total = static_cast<double>(freqs.total);
  for (const auto& [id, c] : freqs.counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return 100.0 * h / std::log2(static_cast<double>(freqs.vocab_size));
}

std::vector<double> LanguageDistribution(Corpus stream, std::size_t vocab_size, std::uint64_t budget) {
  const FrequencyTable t = BudgetedCounts(stream, vocab_size, budget);
  if (t.total == 0) throw Error("distribution: stream has no tokens");
  std::vector<double> p(vocab_size, 0.0);
  for (const auto& [id, c] : t.counts) p[id] = static_cast<double>(c) / static_cast<double>(t.total);
  return p;
}

}  // namespace stab
