// include/stab/chrf.h

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

#ifndef STAB_CHRF_H_
#define STAB_CHRF_H_

#include <cstdint>
#include <span>
#include <vector>

#include "stab/base.h"

namespace stab {

struct ChrfConfig {
  int max_order = 6;
  double beta = 2.0;

  void Validate() const;
};

// Per-order n-gram statistics; summing them across pairs gives corpus-level
// (micro) chrF.
struct ChrfStats {
  std::vector<std::int64_t> matched;
  std::vector<std::int64_t> hyp_ngrams;
  std::vector<std::int64_t> ref_ngrams;

  explicit ChrfStats(int max_order = 6)
      : matched(max_order, 0), hyp_ngrams(max_order, 0), ref_ngrams(max_order, 0) {}
  ChrfStats& operator+=(const ChrfStats& other);
};

ChrfStats ComputeChrfStats(std::span<const TokenId> hyp, std::span<const TokenId> ref,
                           int max_order);

// Orders with no n-grams on either side are left out of the averages; if
// every order is left out (both inputs empty) the score is 100.
double ChrfFromStats(const ChrfStats& stats, double beta);

// chrF in [0, 100] with each token id as one character.
double Chrf(std::span<const TokenId> hyp, std::span<const TokenId> ref,
            const ChrfConfig& cfg = {});

}  // namespace stab

#endif  // STAB_CHRF_H_
