// src/pretokenized.cc

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

#include "stab/pretokenized.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stab {
using nlohmann::json;

PretokenizedIndex PretokenizedIndex::Load(const std::filesystem::path& path,
                                          const TokenizerDescriptor& desc) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open token file " + path.string());
  PretokenizedIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const json obj = json::parse(line);
      std::string utt = obj.at("utterance_id").get<std::string>();
      std::string pert = obj.at("perturbation").get<std::string>();
      std::vector<TokenId> tokens;
      const auto& arr = obj.at("tokens");
      if (!arr.is_array()) throw Error("\"tokens\" must be an array");
      tokens.reserve(arr.size());
      for (const auto& v : arr) {
        if (!v.is_number_integer()) throw Error("token ids must be integers");
        const auto id = v.get<std::int64_t>();
        if (id < 0 || static_cast<std::uint64_t>(id) >= desc.vocab_size) {
          throw Error("token id " + std::to_string(id) + " outside vocabulary of size " +
                      std::to_string(desc.vocab_size));
        }
        tokens.push_back(static_cast<TokenId>(id));
      }
      if (index.Find(utt, pert))
        throw Error("duplicate entry for (" + utt + ", " + pert + ")");
      index.Insert(std::move(utt), std::move(pert), std::move(tokens));
    } catch (const json::exception& e) {
      throw Error(where + ": malformed token record (" + e.what() + ")");
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return index;
}

void PretokenizedIndex::Insert(std::string utterance_id, std::string perturbation,
                               std::vector<TokenId> tokens) {
  entries_[{std::move(utterance_id), std::move(perturbation)}] = std::move(tokens);
}

const std::vector<TokenId>* PretokenizedIndex::Find(std::string_view utterance_id,
                                                    std::string_view perturbation) const {
  auto it = entries_.find({std::string(utterance_id), std::string(perturbation)});
  return it == entries_.end() ? nullptr : &it->second;
}

void PretokenizedIndex::Write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write token file " + path.string());
  for (const auto& [key, tokens] : entries_) {
    out << json{{"utterance_id", key.first}, {"perturbation", key.second}, {"tokens", tokens}}.dump()
        << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

FileTokenizer::FileTokenizer(TokenizerDescriptor desc, PretokenizedIndex index)
    : desc_(std::move(desc)), index_(std::move(index)) {
  desc_.adapter = AdapterKind::kFiles;
  desc_.Validate();
  if (desc_.config_hash == 0) {
    Hasher h;
    h.Str(desc_.tokenizer_id).U64(desc_.vocab_size).F64(desc_.frame_rate_hz);
    for (const auto& [key, tokens] : index_.entries()) {
      h.Str(key.first).Str(key.second).U64(tokens.size());
      h.Bytes(tokens.data(), tokens.size() * sizeof(TokenId));
    }
    desc_.config_hash = h.digest();
  }
}

TokenSequence FileTokenizer::Tokenize(const AudioInput& input) {
  const auto* tokens = index_.Find(input.utterance_id, input.perturbation);
  if (!tokens) {
    throw Error("files adapter: no tokens for utterance \"" + std::string(input.utterance_id) +
                "\" with perturbation \"" + std::string(input.perturbation) + "\"");
  }
  TokenSequence seq;
  seq.tokens = *tokens;
  seq.frame_rate_hz = desc_.frame_rate_hz;
  seq.source_utterance = std::string(input.utterance_id);
  seq.perturbation = std::string(input.perturbation);
  return seq;
}

}  // namespace stab
