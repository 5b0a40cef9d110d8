// include/stab/compress.h

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

#ifndef STAB_COMPRESS_H_
#define STAB_COMPRESS_H_

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "stab/base.h"

namespace stab {

using Corpus = std::span<const std::vector<TokenId>>;

struct FrequencyTable {
  std::map<TokenId, std::uint64_t> counts;  // ids with count > 0 only
  std::uint64_t total = 0;
  std::size_t vocab_size = 0;

  explicit FrequencyTable(std::size_t vocab = 0) : vocab_size(vocab) {}
  void Add(std::span<const TokenId> tokens);
  void Add(TokenId id, std::uint64_t count = 1);
  FrequencyTable& operator+=(const FrequencyTable& other);

  bool operator==(const FrequencyTable&) const = default;
};

FrequencyTable CountTokens(Corpus seqs, std::size_t vocab_size);

// Percent of tokens removed by collapsing runs of equal adjacent ids.
double DedupEfficiency(Corpus seqs);
std::vector<TokenId> CollapseRuns(std::span<const TokenId> seq);

// Optimal prefix-code lengths. Merges the two lightest subtrees, ordering
// ties by the smallest id each subtree contains. A one-symbol alphabet gets
// length 1.
std::map<TokenId, int> HuffmanCodeLengths(const FrequencyTable& freqs);

// Fixed-length code size for the declared vocabulary, ceil(log2 |V|).
int FixedCodeBits(std::size_t vocab_size);

// 100 * (1 - huffman bits / fixed-length bits).
double HuffmanEfficiency(Corpus seqs, std::size_t vocab_size);

struct BpeMerge {
  TokenId left = 0;
  TokenId right = 0;
  TokenId merged = 0;
  std::uint64_t count = 0;  // adjacent occurrences when chosen

  bool operator==(const BpeMerge&) const = default;
};

struct BpeResult {
  std::vector<BpeMerge> merges;
  std::uint64_t original_length = 0;
  std::uint64_t encoded_length = 0;
  std::vector<std::vector<TokenId>> encoded;  // the corpus after all merges
};

// Greedy pair merging inside sequence boundaries. The most frequent adjacent
// pair wins, ties to the lexicographically smallest pair; merges apply left
// to right without overlap. Stops early once no pair occurs twice. New ids
// start at `first_new_id` (0 means max id + 1).
BpeResult LearnBpe(Corpus seqs, std::size_t n_merges, TokenId first_new_id = 0);

std::vector<TokenId> BpeEncode(std::span<const TokenId> seq, std::span<const BpeMerge> merges);
std::vector<TokenId> BpeDecode(std::span<const TokenId> seq, std::span<const BpeMerge> merges);

// 100 * (1 - encoded length / original length), merges learned on `seqs`.
double BpeEfficiency(Corpus seqs, std::size_t n_merges);

}  // namespace stab

#endif  // STAB_COMPRESS_H_
