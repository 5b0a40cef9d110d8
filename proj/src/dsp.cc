// src/dsp.cc

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

#include "stab/dsp.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace stab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// Shortest text that parses back to the same double.
std::string Num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Windowed-sinc kernel tabulated over [0, kZeroCrossings] in units of the
// lower sample rate.
constexpr int kZeroCrossings = 32;
constexpr int kTableRes = 512;
constexpr double kCutoff = 0.9;  // fraction of the lower Nyquist frequency
constexpr double kKaiserBeta = 8.0;

const std::vector<double>& KernelTable() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kZeroCrossings * kTableRes + 2, 0.0);
    const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
    for (int i = 0; i <= kZeroCrossings * kTableRes; ++i) {
      const double u = static_cast<double>(i) / kTableRes;
      const double x = kCutoff * u;
      const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double r = u / kZeroCrossings;
      const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
      t[i] = sinc * window;
    }
    return t;
  }();
  return table;
}

}  // namespace

std::string_view PerturbationSpec::kind() const {
  return std::visit(Overloaded{[](const NoiseParams&) { return std::string_view("noise"); },
                               [](const SpeedParams&) { return std::string_view("speed"); },
                               [](const PitchParams&) { return std::string_view("pitch"); },
                               [](const CropParams&) { return std::string_view("crop"); }},
                    params_);
}

std::string PerturbationSpec::Canonical() const {
  return std::visit(
      Overloaded{[](const NoiseParams& p) {
                   return "noise(snr_db=" + Num(p.snr_db) + ",seed=" + std::to_string(p.seed) + ")";
                 },
                 [](const SpeedParams& p) { return "speed(factor=" + Num(p.factor) + ")"; },
                 [](const PitchParams& p) { return "pitch(semitones=" + Num(p.semitones) + ")"; },
                 [](const CropParams& p) {
                   return "crop(start_s=" + Num(p.start_s) + ",len_s=" + Num(p.len_s) + ")";
                 }},
      params_);
}

std::string PerturbationSpec::DigestHex() const {
  return HexDigest(Hasher().Str(Canonical()).digest());
}

void PerturbationSpec::Validate() const {
  std::visit(Overloaded{[](const NoiseParams& p) {
                          if (!std::isfinite(p.snr_db)) throw Error("noise: snr_db must be finite");
                        },
                        [](const SpeedParams& p) {
                          if (!(p.factor > 0.0)) throw Error("speed: factor must be > 0");
                        },
                        [](const PitchParams& p) {
                          if (!std::isfinite(p.semitones)) throw Error("pitch: semitones must be finite");
                        },
                        [](const CropParams& p) {
                          if (!(p.len_s > 0.0) || !(p.start_s >= 0.0))
                            throw Error("crop: need start_s >= 0 and len_s > 0");
                        }},
             params_);
}

std::uint64_t NoiseSeedFor(std::string_view utterance_id, double snr_db,
                           std::uint64_t global_seed) {
  return Hasher().Str(utterance_id).F64(snr_db).U64(global_seed).digest();
}

std::vector<double> GaussianNoise(std::size_t n, double variance, std::uint64_t seed) {
  Rng rng(seed);
  const double sd = std::sqrt(variance);
  std::vector<double> out(n);
  for (auto& v : out) v = sd * rng.Gaussian();
  return out;
}

std::vector<float> AddGaussianNoise(std::span<const float> audio, double snr_db,
                                    std::uint64_t seed, double* clipped_fraction) {
  if (audio.empty()) throw Error("noise: empty input");
  if (!std::isfinite(snr_db)) throw Error("noise: snr_db must be finite");
  double power = 0.0;
  for (float v : audio) power += static_cast<double>(v) * v;
  power /= static_cast<double>(audio.size());
  if (power == 0.0) throw Error("noise: all-zero input, SNR undefined");
  const auto noise = GaussianNoise(audio.size(), power / std::pow(10.0, snr_db / 10.0), seed);
  std::vector<float> out(audio.size());
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < audio.size(); ++i) {
    const double y = audio[i] + noise[i];
    if (y > 1.0 || y < -1.0) ++clipped;
    out[i] = static_cast<float>(std::clamp(y, -1.0, 1.0));
  }
  if (clipped_fraction) *clipped_fraction = static_cast<double>(clipped) / audio.size();
  return out;
}

std::vector<float> ResampleByStep(std::span<const float> audio, double step,
                                  std::size_t out_len) {
  if (!(step > 0.0)) throw Error("resample: step must be positive");
  const auto& table = KernelTable();
  const double scale = std::min(1.0, 1.0 / step);  // kernel stretch for decimation
  const double half = kZeroCrossings / scale;
  const double gain = scale * kCutoff;
  const auto n = static_cast<long>(audio.size());
  std::vector<float> out(out_len);
  for (std::size_t j = 0; j < out_len; ++j) {
    const double center = static_cast<double>(j) * step;
    const long lo = std::max(0L, static_cast<long>(std::ceil(center - half)));
    const long hi = std::min(n - 1, static_cast<long>(std::floor(center + half)));
    double acc = 0.0;
    for (long k = lo; k <= hi; ++k) {
      const double pos = std::abs(center - static_cast<double>(k)) * scale * kTableRes;
      const auto idx = static_cast<std::size_t>(pos);
      if (idx >= table.size() - 1) continue;
      const double frac = pos - static_cast<double>(idx);
      acc += audio[k] * (table[idx] + frac * (table[idx + 1] - table[idx]));
    }
    out[j] = static_cast<float>(acc * gain);
  }
  return out;
}

std::vector<float> Resample(std::span<const float> audio, int from_hz, int to_hz) {
  if (from_hz < 4000 || from_hz > 96000 || to_hz < 4000 || to_hz > 96000)
    throw Error("resample: rates must lie in [4000, 96000] Hz");
  if (from_hz == to_hz) return {audio.begin(), audio.end()};
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(audio.size()) * to_hz / from_hz));
  return ResampleByStep(audio, static_cast<double>(from_hz) / to_hz, out_len);
}

std::vector<float> ChangeSpeed(std::span<const float> audio, double factor) {
  if (!(factor >= 0.25 && factor <= 4.0)) throw Error("speed: factor must lie in [0.25, 4]");
  if (factor == 1.0) return {audio.begin(), audio.end()};
  const auto out_len = static_cast<std::size_t>(std::llround(audio.size() / factor));
  return ResampleByStep(audio, factor, out_len);
}

std::vector<float> TimeStretchToLength(std::span<const float> audio,
                                       std::size_t target_len, int rate_hz) {
  const auto frame = static_cast<std::size_t>(std::lround(0.04 * rate_hz)) & ~std::size_t{1};
  const std::size_t hop = frame / 2;
  const auto tolerance = static_cast<long>(std::lround(0.01 * rate_hz));
  if (audio.size() < frame || target_len < frame)
    throw Error("time stretch: audio shorter than one 40 ms frame");

  // Zero padding on both sides lets the search run without bounds checks.
  const long pad = tolerance + static_cast<long>(frame);
  std::vector<float> src(audio.size() + 2 * pad, 0.0f);
  std::copy(audio.begin(), audio.end(), src.begin() + pad);
  auto at = [&](long pos) { return src.data() + pad + pos; };

  std::vector<float> window(frame);
  for (std::size_t i = 0; i < frame; ++i)
    window[i] = static_cast<float>(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame));

  const double analysis_hop = static_cast<double>(hop) * audio.size() / target_len;
  const std::size_t n_frames = (target_len - frame + hop - 1) / hop + 1;
  const long max_pos = static_cast<long>(audio.size());
  std::vector<double> out(n_frames * hop + frame, 0.0);
  std::vector<double> weight(out.size(), 0.0);
  long prev = 0;
  for (std::size_t m = 0; m < n_frames; ++m) {
    long pos = 0;
    if (m > 0) {
      const long natural = prev + static_cast<long>(hop);
      const long nominal = std::lround(m * analysis_hop);
      const float* ref = at(std::min(natural, max_pos));
      double best = -1.0;
      long best_delta = 0;
      // Visit 0, -1, +1, -2, ... so ties resolve to the smallest shift.
      for (long step = 0; step <= 2 * tolerance; ++step) {
        const long delta = (step % 2 == 0) ? -(step / 2) : (step + 1) / 2;
        const long cand = std::clamp(nominal + delta, -tolerance, max_pos);
        const float* x = at(cand);
        double corr = 0.0;
        for (std::size_t i = 0; i < frame; ++i) corr += static_cast<double>(x[i]) * ref[i];
        if (step == 0 || corr > best) {
          best = corr;
          best_delta = delta;
        }
      }
      pos = std::clamp(nominal + best_delta, -tolerance, max_pos);
    }
    const float* x = at(pos);
    const std::size_t base = m * hop;
    for (std::size_t i = 0; i < frame; ++i) {
      out[base + i] += window[i] * x[i];
      weight[base + i] += window[i];
    }
    prev = pos;
  }
  std::vector<float> result(target_len);
  for (std::size_t i = 0; i < target_len; ++i) {
    result[i] = static_cast<float>(weight[i] > 1e-3 ? out[i] / weight[i] : out[i]);
  }
  return result;
}

std::vector<float> ShiftPitch(std::span<const float> audio, double semitones, int rate_hz) {
  if (!(std::abs(semitones) <= 12.0)) throw Error("pitch: |semitones| must be <= 12");
  if (audio.size() < static_cast<std::size_t>(std::lround(0.04 * rate_hz)))
    throw Error("pitch: audio shorter than one 40 ms frame");
  if (semitones == 0.0) return {audio.begin(), audio.end()};
  const double ratio = std::pow(2.0, semitones / 12.0);
  const auto squeezed_len = static_cast<std::size_t>(std::llround(audio.size() / ratio));
  const auto squeezed = ResampleByStep(audio, ratio, squeezed_len);
  return TimeStretchToLength(squeezed, audio.size(), rate_hz);
}

std::vector<float> Crop(std::span<const float> audio, double start_s, double len_s,
                        int rate_hz) {
  if (!(start_s >= 0.0) || !(len_s > 0.0)) throw Error("crop: need start_s >= 0 and len_s > 0");
  const auto begin = static_cast<std::size_t>(std::llround(start_s * rate_hz));
  const auto end = static_cast<std::size_t>(std::llround((start_s + len_s) * rate_hz));
  if (end > audio.size()) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "crop: [%g s, %g s) exceeds audio duration %g s", start_s,
                  start_s + len_s, static_cast<double>(audio.size()) / rate_hz);
    throw Error(msg);
  }
  return {audio.begin() + static_cast<long>(begin), audio.begin() + static_cast<long>(end)};
}

std::vector<float> ApplyPerturbation(std::span<const float> audio, int rate_hz,
                                     const PerturbationSpec& spec,
                                     std::string_view utterance_id,
                                     double* clipped_fraction) {
  return std::visit(
      Overloaded{[&](const NoiseParams& p) {
                   return AddGaussianNoise(audio, p.snr_db,
                                           NoiseSeedFor(utterance_id, p.snr_db, p.seed),
                                           clipped_fraction);
                 },
                 [&](const SpeedParams& p) { return ChangeSpeed(audio, p.factor); },
                 [&](const PitchParams& p) { return ShiftPitch(audio, p.semitones, rate_hz); },
                 [&](const CropParams& p) { return Crop(audio, p.start_s, p.len_s, rate_hz); }},
      spec.params());
}

}  // namespace stab
