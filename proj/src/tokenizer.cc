// src/tokenizer.cc

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

#include "stab/tokenizer.h"

namespace stab {

std::string_view AdapterName(AdapterKind kind) {
  switch (kind) {
    case AdapterKind::kBuiltin:
      return "builtin";
    case AdapterKind::kFiles:
      return "files";
    case AdapterKind::kSubprocess:
      return "subprocess";
  }
  return "unknown";
}

void TokenizerDescriptor::Validate() const {
  if (tokenizer_id.empty()) throw Error("tokenizer_id must not be empty");
  if (vocab_size < 2) throw Error("tokenizer " + tokenizer_id + ": vocab_size must be >= 2");
  if (!(frame_rate_hz > 0.0)) throw Error("tokenizer " + tokenizer_id + ": frame_rate_hz must be > 0");
}

void CheckTokenRange(std::span<const TokenId> tokens, std::size_t vocab_size,
                     std::string_view context) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= vocab_size) {
      throw Error(std::string(context) + ": token id " + std::to_string(tokens[i]) +
                  " at position " + std::to_string(i) + " is outside vocabulary of size " +
                  std::to_string(vocab_size));
    }
  }
}

}  // namespace stab
