// include/stab/reference_tokenizer.h

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

#ifndef STAB_REFERENCE_TOKENIZER_H_
#define STAB_REFERENCE_TOKENIZER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "stab/features.h"
#include "stab/kmeans.h"
#include "stab/manifest.h"
#include "stab/tokenizer.h"

namespace stab {

// Log-mel frames stacked 4 at a time (25 Hz at a 10 ms hop), quantized by
// k-means. A desk-scale stand-in for encoder + k-means tokenizers.
struct ReferenceTokenizerConfig {
  int n_mels = 40;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  int stack = 4;
  int k = 64;
  std::uint64_t kmeans_seed = 0;
  int max_iters = 50;
  double rel_tol = 1e-4;

  void Validate() const;
  LogMelConfig logmel() const { return {n_mels, window_ms, hop_ms}; }
  double frame_rate_hz() const { return 1000.0 / (hop_ms * stack); }
  Digest digest() const;
};

struct ReferenceModel {
  ReferenceTokenizerConfig config;
  int sample_rate_hz = 16000;
  FeatureMatrix centroids;  // k x (n_mels * stack)

  Digest digest() const;
  TokenizerDescriptor descriptor() const;
};

// Stacked log-mel features of one clip.
FeatureMatrix ReferenceFeatures(std::span<const float> audio, int rate_hz,
                                const ReferenceTokenizerConfig& cfg);

// Requires at least 10*k stacked frames across the corpus.
ReferenceModel FitReferenceTokenizer(const CorpusManifest& corpus,
                                     const ReferenceTokenizerConfig& cfg,
                                     int workers = 1,
                                     KMeansResult* fit_details = nullptr);

void SaveReferenceModel(const std::filesystem::path& path, const ReferenceModel& model);
ReferenceModel LoadReferenceModel(const std::filesystem::path& path);

class ReferenceTokenizer : public Tokenizer {
 public:
  explicit ReferenceTokenizer(ReferenceModel model);

  const TokenizerDescriptor& descriptor() const override { return descriptor_; }
  TokenSequence Tokenize(const AudioInput& input) override;
  const ReferenceModel& model() const { return model_; }

 private:
  ReferenceModel model_;
  TokenizerDescriptor descriptor_;
};

}  // namespace stab

#endif  // STAB_REFERENCE_TOKENIZER_H_
