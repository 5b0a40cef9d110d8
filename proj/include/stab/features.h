// include/stab/features.h

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

#ifndef STAB_FEATURES_H_
#define STAB_FEATURES_H_

#include <cstddef>
#include <span>
#include <vector>

namespace stab {

// Row-major float matrix; rows are frames or points.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

  std::span<float> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const float> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  bool operator==(const FeatureMatrix&) const = default;
};

struct LogMelConfig {
  int n_mels = 40;
  double window_ms = 25.0;
  double hop_ms = 10.0;
  double low_freq_hz = 20.0;
};

// log(mel energy + 1e-6) per frame, Hann window, HTK mel scale.
// Frame count is floor((len - window) / hop) + 1.
FeatureMatrix ComputeLogMel(std::span<const float> audio, int rate_hz,
                            const LogMelConfig& cfg);

// Concatenates `stack` consecutive frames with stride `stack`; a trailing
// partial group is dropped.
FeatureMatrix StackFrames(const FeatureMatrix& frames, int stack);

}  // namespace stab

#endif  // STAB_FEATURES_H_
