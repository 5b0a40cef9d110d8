// include/stab/pretokenized.h

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

#ifndef STAB_PRETOKENIZED_H_
#define STAB_PRETOKENIZED_H_

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stab/tokenizer.h"

namespace stab {

// Token sequences keyed by (utterance_id, perturbation digest or "clean").
// File form: one {"utterance_id":..,"perturbation":..,"tokens":[..]} per line.
class PretokenizedIndex {
 public:
  using Key = std::pair<std::string, std::string>;

  static PretokenizedIndex Load(const std::filesystem::path& path,
                                const TokenizerDescriptor& desc);

  void Insert(std::string utterance_id, std::string perturbation, std::vector<TokenId> tokens);
  const std::vector<TokenId>* Find(std::string_view utterance_id,
                                   std::string_view perturbation) const;
  void Write(const std::filesystem::path& path) const;

  std::size_t size() const { return entries_.size(); }
  const std::map<Key, std::vector<TokenId>>& entries() const { return entries_; }

  bool operator==(const PretokenizedIndex&) const = default;

 private:
  std::map<Key, std::vector<TokenId>> entries_;
};

class FileTokenizer : public Tokenizer {
 public:
  FileTokenizer(TokenizerDescriptor desc, PretokenizedIndex index);

  const TokenizerDescriptor& descriptor() const override { return desc_; }
  TokenSequence Tokenize(const AudioInput& input) override;
  bool needs_audio() const override { return false; }

 private:
  TokenizerDescriptor desc_;
  PretokenizedIndex index_;
};

}  // namespace stab

#endif  // STAB_PRETOKENIZED_H_
