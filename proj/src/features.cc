// src/features.cc

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

#include "stab/features.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "stab/base.h"

namespace stab {
namespace {

// FFTW planning is not thread-safe; plans are created once per size under a
// lock and executed with the new-array interface.
class RealFftPlan {
 public:
  static const RealFftPlan& Get(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<RealFftPlan>> plans;
    std::lock_guard lock(mu);
    auto& slot = plans[n];
    if (!slot) slot.reset(new RealFftPlan(n));
    return *slot;
  }

  void Execute(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(plan_, in, out); }

 private:
  explicit RealFftPlan(int n) {
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  fftw_plan plan_;
};

double MelScale(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }

// n_mels x (fft/2+1) triangular weights, triangles defined on the mel axis.
std::vector<std::vector<double>> MelBank(int n_mels, int fft_size, int rate_hz, double low_hz) {
  const int n_bins = fft_size / 2 + 1;
  const double mel_lo = MelScale(low_hz);
  const double mel_hi = MelScale(rate_hz / 2.0);
  const double delta = (mel_hi - mel_lo) / (n_mels + 1);
  std::vector<std::vector<double>> bank(n_mels, std::vector<double>(n_bins, 0.0));
  for (int m = 0; m < n_mels; ++m) {
    const double left = mel_lo + m * delta;
    const double center = left + delta;
    const double right = center + delta;
    for (int b = 0; b < n_bins; ++b) {
      const double mel = MelScale(static_cast<double>(b) * rate_hz / fft_size);
      if (mel > left && mel < right) {
        bank[m][b] = mel <= center ? (mel - left) / delta : (right - mel) / delta;
      }
    }
  }
  return bank;
}

struct FftBuffers {
  explicit FftBuffers(int n) : in(fftw_alloc_real(n)), out(fftw_alloc_complex(n / 2 + 1)) {}
  ~FftBuffers() {
    fftw_free(in);
    fftw_free(out);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
  double* in;
  fftw_complex* out;
};

}  // namespace

FeatureMatrix ComputeLogMel(std::span<const float> audio, int rate_hz, const LogMelConfig& cfg) {
  const auto window = static_cast<std::size_t>(std::lround(cfg.window_ms * rate_hz / 1000.0));
  const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_ms * rate_hz / 1000.0));
  if (window == 0 || hop == 0 || cfg.n_mels < 1) throw Error("logmel: invalid frame configuration");
  if (audio.size() < window) throw Error("logmel: audio shorter than one analysis window");
  int fft_size = 1;
  while (static_cast<std::size_t>(fft_size) < window) fft_size *= 2;

  const std::size_t n_frames = (audio.size() - window) / hop + 1;
  const auto bank = MelBank(cfg.n_mels, fft_size, rate_hz, cfg.low_freq_hz);
  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i)
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (window - 1));

  const RealFftPlan& plan = RealFftPlan::Get(fft_size);
  FftBuffers buf(fft_size);
  const int n_bins = fft_size / 2 + 1;
  std::vector<double> power(n_bins);
  FeatureMatrix out(n_frames, cfg.n_mels);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const float* x = audio.data() + f * hop;
    for (std::size_t i = 0; i < window; ++i) buf.in[i] = x[i] * hann[i];
    std::fill(buf.in + window, buf.in + fft_size, 0.0);
    plan.Execute(buf.in, buf.out);
    for (int b = 0; b < n_bins; ++b)
      power[b] = buf.out[b][0] * buf.out[b][0] + buf.out[b][1] * buf.out[b][1];
    auto row = out.row(f);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double e = 0.0;
      for (int b = 0; b < n_bins; ++b) e += bank[m][b] * power[b];
      row[m] = static_cast<float>(std::log(e + 1e-6));
    }
  }
  return out;
}

FeatureMatrix StackFrames(const FeatureMatrix& frames, int stack) {
  if (stack < 1) throw Error("stack must be >= 1");
  const std::size_t groups = frames.rows / static_cast<std::size_t>(stack);
  FeatureMatrix out(groups, frames.cols * stack);
  std::copy(frames.data.begin(),
            frames.data.begin() + static_cast<long>(groups * stack * frames.cols),
            out.data.begin());
  return out;
}

}  // namespace stab
