// include/stab/dsp.h

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

#ifndef STAB_DSP_H_
#define STAB_DSP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stab/base.h"

namespace stab {

struct NoiseParams {
  double snr_db = 10.0;
  std::uint64_t seed = 0;  // global seed; per-utterance seeds derive from it
};
struct SpeedParams {
  double factor = 0.8;
};
struct PitchParams {
  double semitones = 2.0;
};
struct CropParams {
  double start_s = 0.0;
  double len_s = 4.0;
};

// A named audio transformation. Holding exactly one parameter struct makes
// "only the fields of its kind are set" structural.
class PerturbationSpec {
 public:
  using Params = std::variant<NoiseParams, SpeedParams, PitchParams, CropParams>;

  PerturbationSpec(Params params) : params_(params) { Validate(); }  // NOLINT

  const Params& params() const { return params_; }
  std::string_view kind() const;

  // Canonical text form, e.g. "noise(snr_db=10,seed=0)". Its digest is the
  // perturbation key used by the token cache and pre-tokenized files.
  std::string Canonical() const;
  std::string DigestHex() const;

 private:
  void Validate() const;
  Params params_;
};

inline constexpr std::string_view kCleanPerturbation = "clean";

// Seed for one utterance's noise draw: hash(utterance_id, snr_db, global seed).
std::uint64_t NoiseSeedFor(std::string_view utterance_id, double snr_db,
                           std::uint64_t global_seed);

// i.i.d. N(0, variance) samples; the draw AddGaussianNoise adds.
std::vector<double> GaussianNoise(std::size_t n, double variance,
                                  std::uint64_t seed);

// x + n with var(n) = mean(x^2) / 10^(snr_db/10), clamped to [-1, 1].
// `clipped_fraction`, when given, receives the share of clamped samples.
std::vector<float> AddGaussianNoise(std::span<const float> audio, double snr_db,
                                    std::uint64_t seed,
                                    double* clipped_fraction = nullptr);

// Turntable-style rate change: duration scales by 1/factor and pitch by
// factor. Requires 0.25 <= factor <= 4.
std::vector<float> ChangeSpeed(std::span<const float> audio, double factor);

// Pitch scaled by 2^(semitones/12), duration kept: resample by the pitch
// factor, then WSOLA back to the original length. |semitones| <= 12.
std::vector<float> ShiftPitch(std::span<const float> audio, double semitones,
                              int rate_hz);

// Waveform-similarity overlap-add: 40 ms Hann frames, 50% overlap, +/-10 ms
// similarity search. Output has exactly target_len samples.
std::vector<float> TimeStretchToLength(std::span<const float> audio,
                                       std::size_t target_len, int rate_hz);

// Samples [round(start_s*rate), round((start_s+len_s)*rate)).
std::vector<float> Crop(std::span<const float> audio, double start_s,
                        double len_s, int rate_hz);

// Kaiser-windowed sinc resampling; both rates in [4000, 96000].
std::vector<float> Resample(std::span<const float> audio, int from_hz,
                            int to_hz);

// Reads input position j*step for output sample j, low-passing at the lower
// of the two rates.
std::vector<float> ResampleByStep(std::span<const float> audio, double step,
                                  std::size_t out_len);

// Applies `spec` to one utterance. Noise draws use NoiseSeedFor(utterance_id).
std::vector<float> ApplyPerturbation(std::span<const float> audio, int rate_hz,
                                     const PerturbationSpec& spec,
                                     std::string_view utterance_id,
                                     double* clipped_fraction = nullptr);

}  // namespace stab

#endif  // STAB_DSP_H_
