// src/token_cache.cc

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

#include "stab/token_cache.h"

#include <cstring>
#include <fstream>
#include <system_error>
#include <thread>

namespace stab {
namespace fs = std::filesystem;

namespace {
constexpr char kMagic[8] = {'S', 'T', 'O', 'K', '1', 0, 0, 0};
}

TokenCache::TokenCache(std::optional<fs::path> dir) : dir_(std::move(dir)) {
  if (dir_) {
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec) throw Error("cannot create cache directory " + dir_->string() + ": " + ec.message());
  }
}

fs::path TokenCache::FileFor(Digest key) const {
  const std::string hex = HexDigest(key);
  return *dir_ / hex.substr(0, 2) / (hex + ".tok");
}

std::optional<std::vector<TokenId>> TokenCache::Get(Digest key) {
  {
    std::shared_lock lock(mu_);
    auto it = memory_.find(key);
    if (it != memory_.end()) {
      ++hits_;
      return it->second;
    }
  }
  if (dir_) {
    std::ifstream in(FileFor(key), std::ios::binary);
    char magic[8];
    std::uint64_t count = 0;
    if (in.read(magic, 8) && std::memcmp(magic, kMagic, 8) == 0 &&
        in.read(reinterpret_cast<char*>(&count), sizeof count)) {
      std::vector<TokenId> tokens(count);
      if (in.read(reinterpret_cast<char*>(tokens.data()),
                  static_cast<std::streamsize>(count * sizeof(TokenId)))) {
        std::unique_lock lock(mu_);
        memory_.emplace(key, tokens);
        ++hits_;
        return tokens;
      }
    }
  }
  ++misses_;
  return std::nullopt;
}

void TokenCache::Put(Digest key, const std::vector<TokenId>& tokens) {
  {
    std::unique_lock lock(mu_);
    memory_.insert_or_assign(key, tokens);
  }
  if (!dir_) return;
  std::lock_guard lock(write_mu_);
  const fs::path file = FileFor(key);
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    const std::uint64_t count = tokens.size();
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&count), sizeof count);
    out.write(reinterpret_cast<const char*>(tokens.data()),
              static_cast<std::streamsize>(count * sizeof(TokenId)));
    if (!out) throw Error("cannot write cache entry " + tmp.string());
  }
  fs::rename(tmp, file, ec);
  if (ec) throw Error("cannot commit cache entry " + file.string() + ": " + ec.message());
}

Digest TokenCacheKey(Digest config_hash, std::span<const float> audio, int rate_hz,
                     std::string_view perturbation) {
  return Hasher()
      .U64(config_hash)
      .U64(static_cast<std::uint64_t>(rate_hz))
      .U64(audio.size())
      .Bytes(audio.data(), audio.size() * sizeof(float))
      .Str(perturbation)
      .digest();
}

TokenSequence CachingTokenizer::Tokenize(const AudioInput& input) {
  // Key-lookup adapters have no audio content to address.
  if (!inner_.needs_audio()) return inner_.Tokenize(input);
  const Digest key =
      TokenCacheKey(inner_.descriptor().config_hash, input.samples, input.rate_hz, input.perturbation);
  if (auto hit = cache_.Get(key)) {
    TokenSequence seq;
    seq.tokens = std::move(*hit);
    seq.frame_rate_hz = inner_.descriptor().frame_rate_hz;
    seq.source_utterance = std::string(input.utterance_id);
    seq.perturbation = std::string(input.perturbation);
    return seq;
  }
  TokenSequence seq = inner_.Tokenize(input);
  cache_.Put(key, seq.tokens);
  return seq;
}

}  // namespace stab
