// include/stab/token_cache.h

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

#ifndef STAB_TOKEN_CACHE_H_
#define STAB_TOKEN_CACHE_H_

#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stab/tokenizer.h"

namespace stab {

// Content-addressed token store: memory always, plus an optional directory
// that persists across runs. Concurrent readers, serialized writers.
class TokenCache {
 public:
  explicit TokenCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<std::vector<TokenId>> Get(Digest key);
  void Put(Digest key, const std::vector<TokenId>& tokens);

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

 private:
  std::filesystem::path FileFor(Digest key) const;

  std::optional<std::filesystem::path> dir_;
  std::shared_mutex mu_;
  std::mutex write_mu_;
  std::unordered_map<Digest, std::vector<TokenId>> memory_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

// Key over (tokenizer config hash, audio content, perturbation digest).
Digest TokenCacheKey(Digest config_hash, std::span<const float> audio, int rate_hz,
                     std::string_view perturbation);

class CachingTokenizer : public Tokenizer {
 public:
  CachingTokenizer(Tokenizer& inner, TokenCache& cache) : inner_(inner), cache_(cache) {}

  const TokenizerDescriptor& descriptor() const override { return inner_.descriptor(); }
  TokenSequence Tokenize(const AudioInput& input) override;
  bool needs_audio() const override { return inner_.needs_audio(); }

 private:
  Tokenizer& inner_;
  TokenCache& cache_;
};

}  // namespace stab

#endif  // STAB_TOKEN_CACHE_H_
