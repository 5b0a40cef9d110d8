// src/compress.cc

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

#include "stab/compress.h"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_map>

namespace stab {

void FrequencyTable::Add(std::span<const TokenId> tokens) {
  for (TokenId t : tokens) ++counts[t];
  total += tokens.size();
}

void FrequencyTable::Add(TokenId id, std::uint64_t count) {
  if (count == 0) return;
  counts[id] += count;
  total += count;
}

FrequencyTable& FrequencyTable::operator+=(const FrequencyTable& other) {
  for (const auto& [id, c] : other.counts) counts[id] += c;
  total += other.total;
  vocab_size = std::max(vocab_size, other.vocab_size);
  return *this;
}

FrequencyTable CountTokens(Corpus seqs, std::size_t vocab_size) {
  FrequencyTable t(vocab_size);
  for (const auto& s : seqs) t.Add(s);
  return t;
}

std::vector<TokenId> CollapseRuns(std::span<const TokenId> seq) {
  std::vector<TokenId> out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i == 0 || seq[i] != seq[i - 1]) out.push_back(seq[i]);
  }
  return out;
}

double DedupEfficiency(Corpus seqs) {
  std::uint64_t total = 0, kept = 0;
  for (const auto& s : seqs) {
    total += s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i == 0 || s[i] != s[i - 1]) ++kept;
    }
  }
  if (total == 0) throw Error("dedup: corpus has no tokens");
  return 100.0 * (1.0 - static_cast<double>(kept) / static_cast<double>(total));
}

std::map<TokenId, int> HuffmanCodeLengths(const FrequencyTable& freqs) {
  if (freqs.counts.empty()) throw Error("huffman: empty frequency table");
  std::map<TokenId, int> lengths;
  if (freqs.counts.size() == 1) {
    lengths[freqs.counts.begin()->first] = 1;
    return lengths;
  }
  struct Node {
    std::uint64_t count;
    TokenId min_id;
    int left, right;  // -1 for leaves
    TokenId symbol;
  };
  std::vector<Node> nodes;
  nodes.reserve(2 * freqs.counts.size());
  auto heavier = [&](int a, int b) {
    const Node& x = nodes[a];
    const Node& y = nodes[b];
    return x.count != y.count ? x.count > y.count : x.min_id > y.min_id;
  };
  std::priority_queue<int, std::vector<int>, decltype(heavier)> heap(heavier);
  for (const auto& [id, c] : freqs.counts) {
    nodes.push_back({c, id, -1, -1, id});
    heap.push(static_cast<int>(nodes.size()) - 1);
  }
  while (heap.size() > 1) {
    const int a = heap.top();
    heap.pop();
    const int b = heap.top();
    heap.pop();
    nodes.push_back({nodes[a].count + nodes[b].count, std::min(nodes[a].min_id, nodes[b].min_id), a, b, 0});
    heap.push(static_cast<int>(nodes.size()) - 1);
  }
  std::vector<std::pair<int, int>> stack = {{heap.top(), 0}};
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    if (nodes[n].left < 0) {
      lengths[nodes[n].symbol] = depth;
    } else {
      stack.push_back({nodes[n].left, depth + 1});
      stack.push_back({nodes[n].right, depth + 1});
    }
  }
  return lengths;
}

int FixedCodeBits(std::size_t vocab_size) {
  if (vocab_size < 2) throw Error("vocabulary size must be >= 2");
  int bits = 0;
  while ((std::size_t{1} << bits) < vocab_size) ++bits;
  return bits;
}

double HuffmanEfficiency(Corpus seqs, std::size_t vocab_size) {
  const FrequencyTable freqs = CountTokens(seqs, vocab_size);
  if (freqs.total == 0) throw Error("huffman: corpus has no tokens");
  const auto lengths = HuffmanCodeLengths(freqs);
  double coded = 0.0;
  for (const auto& [id, c] : freqs.counts) coded += static_cast<double>(c) * lengths.at(id);
  const double fixed = static_cast<double>(freqs.total) * FixedCodeBits(vocab_size);
  return 100.0 * (1.0 - coded / fixed);
}

namespace {

constexpr TokenId kDeleted = std::numeric_limits<TokenId>::max();

std::uint64_t PairKey(TokenId a, TokenId b) { return (std::uint64_t{a} << 32) | b; }

}  // namespace

BpeResult LearnBpe(Corpus seqs, std::size_t n_merges, TokenId first_new_id) {
  BpeResult result;
  std::vector<TokenId> sym;
  std::vector<std::int64_t> prev, next;
  std::vector<std::size_t> starts;
  TokenId max_id = 0;
  for (const auto& s : seqs) {
    starts.push_back(sym.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto pos = static_cast<std::int64_t>(sym.size());
      sym.push_back(s[i]);
      max_id = std::max(max_id, s[i]);
      prev.push_back(i == 0 ? -1 : pos - 1);
      next.push_back(i + 1 == s.size() ? -1 : pos + 1);
    }
  }
  result.original_length = sym.size();
  if (first_new_id == 0) first_new_id = sym.empty() ? 0 : max_id + 1;
  if (static_cast<std::uint64_t>(first_new_id) + n_merges >= kDeleted)
    throw Error("bpe: merged ids would overflow the token id range");

  std::unordered_map<std::uint64_t, std::int64_t> counts;
  std::unordered_map<std::uint64_t, std::vector<std::int64_t>> positions;
  using Entry = std::pair<std::int64_t, std::uint64_t>;  // (count, pair key)
  auto order = [](const Entry& x, const Entry& y) {
    return x.first != y.first ? x.first < y.first : x.second > y.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(order)> heap(order);

  for (std::size_t i = 0; i < sym.size(); ++i) {
    if (next[i] < 0) continue;
    const auto key = PairKey(sym[i], sym[next[i]]);
    ++counts[key];
    positions[key].push_back(static_cast<std::int64_t>(i));
  }
  for (const auto& [key, c] : counts) heap.push({c, key});

  auto inc = [&](std::uint64_t key, std::int64_t pos) {
    const auto c = ++counts[key];
    positions[key].push_back(pos);
    heap.push({c, key});
  };
  auto dec = [&](std::uint64_t key) {
    const auto c = --counts[key];
    if (c > 0) heap.push({c, key});
  };

  TokenId next_id = first_new_id;
  while (result.merges.size() < n_merges) {
    while (!heap.empty() && counts[heap.top().second] != heap.top().first) heap.pop();
    if (heap.empty() || heap.top().first < 2) break;
    const auto [count, key] = heap.top();
    heap.pop();
    const auto a = static_cast<TokenId>(key >> 32);
    const auto b = static_cast<TokenId>(key & 0xFFFFFFFFu);
    const TokenId x = next_id++;

    std::vector<std::int64_t> cand = std::move(positions[key]);
    positions.erase(key);
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (const std::int64_t i : cand) {
      if (sym[i] != a) continue;
      const std::int64_t j = next[i];
      if (j < 0 || sym[j] != b) continue;
      const std::int64_t p = prev[i];
      const std::int64_t n = next[j];
      if (p >= 0) dec(PairKey(sym[p], a));
      dec(key);
      if (n >= 0) dec(PairKey(b, sym[n]));
      sym[i] = x;
      sym[j] = kDeleted;
      next[i] = n;
      if (n >= 0) prev[n] = i;
      if (p >= 0) inc(PairKey(sym[p], x), p);
      if (n >= 0) inc(PairKey(x, sym[n]), i);
    }
    result.merges.push_back({a, b, x, static_cast<std::uint64_t>(count)});
  }

  result.encoded.reserve(starts.size());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::vector<TokenId> out;
    const std::size_t end = s + 1 < starts.size() ? starts[s + 1] : sym.size();
    if (starts[s] < end) {
      for (std::int64_t i = static_cast<std::int64_t>(starts[s]); i >= 0; i = next[i]) out.push_back(sym[i]);
    }
    result.encoded_length += out.size();
    result.encoded.push_back(std::move(out));
  }
  return result;
}

std::vector<TokenId> BpeEncode(std::span<const TokenId> seq, std::span<const BpeMerge> merges) {
  std::vector<TokenId> cur(seq.begin(), seq.end());
  std::vector<TokenId> out;
  for (const auto& m : merges) {
    out.clear();
    for (std::size_t i = 0; i < cur.size();) {
      if (i + 1 < cur.size() && cur[i] == m.left && cur[i + 1] == m.right) {
        out.push_back(m.merged);
        i += 2;
      } else {
        out.push_back(cur[i]);
        ++i;
      }
    }
    cur.swap(out);
  }
  return cur;
}

std::vector<TokenId> BpeDecode(std::span<const TokenId> seq, std::span<const BpeMerge> merges) {
  std::unordered_map<TokenId, std::pair<TokenId, TokenId>> parts;
  for (const auto& m : merges) parts[m.merged] = {m.left, m.right};
  std::vector<TokenId> out;
  std::vector<TokenId> stack;
  for (TokenId t : seq) {
    stack.push_back(t);
    while (!stack.empty()) {
      const TokenId top = stack.back();
      stack.pop_back();
      auto it = parts.find(top);
      if (it == parts.end()) {
        out.push_back(top);
      } else {
        stack.push_back(it->second.second);
        stack.push_back(it->second.first);
      }
    }
  }
  return out;
}

double BpeEfficiency(Corpus seqs, std::size_t n_merges) {
  const BpeResult r = LearnBpe(seqs, n_merges);
  if (r.original_length == 0) throw Error("bpe: corpus has no tokens");
  return 100.0 * (1.0 - static_cast<double>(r.encoded_length) / static_cast<double>(r.original_length));
}

}  // namespace stab
