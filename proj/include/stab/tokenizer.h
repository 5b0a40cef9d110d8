// include/stab/tokenizer.h

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

#ifndef STAB_TOKENIZER_H_
#define STAB_TOKENIZER_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stab/base.h"

namespace stab {

enum class AdapterKind { kBuiltin, kFiles, kSubprocess };

std::string_view AdapterName(AdapterKind kind);

struct TokenizerDescriptor {
  std::string tokenizer_id;
  std::size_t vocab_size = 0;  // |V|
  double frame_rate_hz = 0.0;  // declared by the adapter, never inferred
  AdapterKind adapter = AdapterKind::kBuiltin;
  Digest config_hash = 0;

  void Validate() const;
};

struct TokenSequence {
  std::vector<TokenId> tokens;
  double frame_rate_hz = 0.0;
  std::string source_utterance;
  std::string perturbation = "clean";  // PerturbationSpec digest or "clean"

  bool operator==(const TokenSequence&) const = default;
};

// One tokenization request. `path` is set only when `samples` are exactly
// the decoded contents of that file (clean audio).
struct AudioInput {
  std::span<const float> samples;
  int rate_hz = 0;
  std::string_view utterance_id;
  std::string_view perturbation = "clean";
  std::optional<std::filesystem::path> path;
};

// Implementations must be safe to call concurrently.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual const TokenizerDescriptor& descriptor() const = 0;
  virtual TokenSequence Tokenize(const AudioInput& input) = 0;
  // False for adapters that look tokens up by key (pre-tokenized files).
  virtual bool needs_audio() const { return true; }
};

// Hard error when any id is outside [0, vocab_size).
void CheckTokenRange(std::span<const TokenId> tokens, std::size_t vocab_size,
                     std::string_view context);

}  // namespace stab

#endif  // STAB_TOKENIZER_H_
