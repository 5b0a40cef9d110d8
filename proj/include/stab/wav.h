// include/stab/wav.h

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

#ifndef STAB_WAV_H_
#define STAB_WAV_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace stab {

struct WavInfo {
  int sample_rate_hz = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::size_t num_frames = 0;
};

// Parses the RIFF header only. Throws Error on anything that is not a
// complete 16-bit PCM WAV file.
WavInfo ProbeWav(const std::filesystem::path& path);

// Reads mono 16-bit PCM, scaled by 1/32768. No resampling: a rate different
// from expected_rate_hz is an error.
std::vector<float> ReadWav(const std::filesystem::path& path,
                           int expected_rate_hz);

// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] and rounded.
void WriteWav(const std::filesystem::path& path, std::span<const float> samples,
              int sample_rate_hz);

}  // namespace stab

#endif  // STAB_WAV_H_
