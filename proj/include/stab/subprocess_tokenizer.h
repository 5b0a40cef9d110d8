// include/stab/subprocess_tokenizer.h

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

#ifndef STAB_SUBPROCESS_TOKENIZER_H_
#define STAB_SUBPROCESS_TOKENIZER_H_

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "stab/tokenizer.h"

namespace stab {

struct SubprocessOptions {
  std::string command;  // run through /bin/sh -c
  int lanes = 1;        // child processes, one request in flight each
  std::chrono::milliseconds timeout{60000};
};

// External tokenizer speaking the line-delimited JSON protocol:
//   child -> {"protocol":1,"tokenizer_id":..,"vocab_size":..,"frame_rate_hz":..}
//   parent -> {"id":..,"audio_path":..,"sample_rate_hz":..}
//          or {"id":..,"pcm16_b64":..,"sample_rate_hz":..}
//   child -> {"id":..,"tokens":[..]} or {"id":..,"error":..}
// Clean audio with a known path goes by path; everything else inline.
class SubprocessTokenizer : public Tokenizer {
 public:
  explicit SubprocessTokenizer(SubprocessOptions options);
  ~SubprocessTokenizer() override;

  const TokenizerDescriptor& descriptor() const override { return desc_; }
  TokenSequence Tokenize(const AudioInput& input) override;

 private:
  class Child;

  std::unique_ptr<Child> Spawn();
  std::unique_ptr<Child> Acquire();
  void Release(std::unique_ptr<Child> child, bool healthy);

  SubprocessOptions options_;
  TokenizerDescriptor desc_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<Child>> idle_;
  int live_ = 0;
  std::uint64_t next_request_ = 0;
};

}  // namespace stab

#endif  // STAB_SUBPROCESS_TOKENIZER_H_
