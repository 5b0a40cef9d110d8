// tests/unit/test_dsp.cc

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

#include <cmath>

#include "doctest.h"
#include "stab/dsp.h"
#include "test_util.h"

using stab::testing::PeakFrequency;
using stab::testing::Power;
using stab::testing::Tone;

namespace {

double MeasuredSnrDb(std::span<const float> clean, std::span<const float> noisy) {
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ps += static_cast<double>(clean[i]) * clean[i];
    const double d = static_cast<double>(noisy[i]) - clean[i];
    pn += d * d;
  }
  return 10.0 * std::log10(ps / pn);
}

}  // namespace

TEST_CASE("gaussian noise hits the requested SNR") {
  const auto x = Tone(440.0, 10.0, 16000, 0.5);
  const auto y = stab::AddGaussianNoise(x, 10.0, 1234);
  CHECK(MeasuredSnrDb(x, y) == doctest::Approx(10.0).epsilon(0.01));
  CHECK(std::abs(MeasuredSnrDb(x, y) - 10.0) < 0.1);
}

TEST_CASE("full-scale input: the drawn noise has the requested SNR before clamping") {
  const auto x = Tone(440.0, 10.0, 16000, 1.0);
  const double variance = Power(x) / std::pow(10.0, 1.0);
  const auto noise = stab::GaussianNoise(x.size(), variance, 99);
  double pn = 0.0;
  for (double v : noise) pn += v * v;
  pn /= static_cast<double>(noise.size());
  CHECK(std::abs(10.0 * std::log10(Power(x) / pn) - 10.0) < 0.1);

  double clipped = -1.0;
  const auto y = stab::AddGaussianNoise(x, 10.0, 99, &clipped);
  CHECK(clipped > 0.0);
  for (float v : y) CHECK_LE(std::abs(v), 1.0f);
  std::size_t at_rail = 0;
  for (float v : y) at_rail += std::abs(v) == 1.0f;
  CHECK(static_cast<double>(at_rail) / y.size() == doctest::Approx(clipped));
}

TEST_CASE("noise is deterministic, seed-sensitive and vanishes at high SNR") {
  const auto x = Tone(300.0, 1.0, 16000, 0.5);
  CHECK(stab::AddGaussianNoise(x, 10.0, 5) == stab::AddGaussianNoise(x, 10.0, 5));
  CHECK(stab::AddGaussianNoise(x, 10.0, 5) != stab::AddGaussianNoise(x, 10.0, 6));
  const auto y = stab::AddGaussianNoise(x, 100.0, 5);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(double(y[i]) - x[i]));
  CHECK(worst < 1e-4);
  CHECK_THROWS_AS(stab::AddGaussianNoise(std::vector<float>(100, 0.0f), 10.0, 1), stab::Error);
  CHECK(stab::NoiseSeedFor("u1", 10.0, 0) != stab::NoiseSeedFor("u2", 10.0, 0));
  CHECK(stab::NoiseSeedFor("u1", 10.0, 0) != stab::NoiseSeedFor("u1", 10.0, 1));
  CHECK(stab::NoiseSeedFor("u1", 10.0, 0) == stab::NoiseSeedFor("u1", 10.0, 0));
}

TEST_CASE("speed change scales duration and pitch together") {
  const auto x = Tone(440.0, 4.0, 16000);
  const auto y = stab::ChangeSpeed(x, 0.8);
  CHECK(static_cast<double>(y.size()) / 16000.0 == doctest::Approx(5.0).epsilon(0.005));
  CHECK(PeakFrequency(y, 16000) == doctest::Approx(352.0).epsilon(0.02));
  const auto same = stab::ChangeSpeed(x, 1.0);
  CHECK(same.size() == x.size());
  CHECK(PeakFrequency(same, 16000) == doctest::Approx(440.0).epsilon(0.005));
  for (double f : {0.5, 0.8, 1.0, 1.25, 2.0}) {
    const auto z = stab::ChangeSpeed(x, f);
    CHECK(std::abs(static_cast<double>(z.size()) * f - static_cast<double>(x.size())) <= 1.0 + f);
  }
  CHECK_THROWS_AS(stab::ChangeSpeed(x, 0.2), stab::Error);
  CHECK_THROWS_AS(stab::ChangeSpeed(x, 4.5), stab::Error);
}

TEST_CASE("pitch shift moves the tone and keeps the duration") {
  const auto x = Tone(440.0, 2.0, 16000);
  const auto up = stab::ShiftPitch(x, 2.0, 16000);
  CHECK(static_cast<double>(up.size()) / x.size() == doctest::Approx(1.0).epsilon(0.01));
  CHECK(PeakFrequency(up, 16000) == doctest::Approx(440.0 * std::pow(2.0, 2.0 / 12.0)).epsilon(0.02));
  const auto zero = stab::ShiftPitch(x, 0.0, 16000);
  CHECK(zero.size() == x.size());
  CHECK(PeakFrequency(zero, 16000) == doctest::Approx(440.0).epsilon(0.005));
  const auto low = Tone(220.0, 2.0, 16000);
  CHECK(PeakFrequency(stab::ShiftPitch(low, -12.0, 16000), 16000, 40.0, 600.0) ==
        doctest::Approx(110.0).epsilon(0.02));
  CHECK_THROWS_AS(stab::ShiftPitch(x, 13.0, 16000), stab::Error);
  CHECK_THROWS_AS(stab::ShiftPitch(std::vector<float>(100, 0.1f), 2.0, 16000), stab::Error);
}

TEST_CASE("pitch shift tracks the ratio across the semitone range") {
  const auto x = Tone(330.0, 0.75, 16000);
  for (int s = -12; s <= 12; s += 3) {
    const auto y = stab::ShiftPitch(x, s, 16000);
    CHECK(static_cast<double>(y.size()) / x.size() == doctest::Approx(1.0).epsilon(0.01));
    CHECK(PeakFrequency(y, 16000, 100.0, 800.0) == doctest::Approx(330.0 * std::pow(2.0, s / 12.0)).epsilon(0.02));
  }
}

TEST_CASE("crop selects the requested sample range") {
  const auto x = Tone(100.0, 10.0, 16000);
  CHECK(stab::Crop(x, 0.0, 4.0, 16000).size() == 64000);
  const auto mid = stab::Crop(x, 1.0, 0.5, 16000);
  REQUIRE(mid.size() == 8000);
  CHECK(mid[0] == x[16000]);
  CHECK(stab::Crop(x, 0.0, 10.0, 16000) == x);
  CHECK_THROWS_AS(stab::Crop(Tone(100.0, 3.0, 16000), 0.0, 4.0, 16000), stab::Error);
}

TEST_CASE("resampling is bandlimited and length-exact") {
  const auto x = Tone(1000.0, 1.0, 16000);
  CHECK(stab::Resample(x, 16000, 16000) == x);
  const auto up = stab::Resample(x, 16000, 48000);
  CHECK(std::abs(static_cast<long>(up.size()) - 48000) <= 1);
  const auto down = stab::Resample(x, 16000, 8000);
  const auto back = stab::Resample(down, 8000, 16000);
  REQUIRE(back.size() == x.size());
  double xy = 0, xx = 0, yy = 0;
  for (std::size_t i = 800; i + 800 < x.size(); ++i) {
    xy += double(x[i]) * back[i];
    xx += double(x[i]) * x[i];
    yy += double(back[i]) * back[i];
  }
  CHECK(xy / std::sqrt(xx * yy) >= 0.99);

  // A tone well below both Nyquist limits keeps at least 40 dB SNR against the
  // analytically generated tone at the target rate.
  const auto ideal = Tone(1000.0, 1.0, 48000);
  double err = 0.0, sig = 0.0;
  for (std::size_t i = 2400; i + 2400 < ideal.size() && i < up.size(); ++i) {
    const double d = double(up[i]) - ideal[i];
    err += d * d;
    sig += double(ideal[i]) * ideal[i];
  }
  CHECK(10.0 * std::log10(sig / err) >= 40.0);
  CHECK_THROWS_AS(stab::Resample(x, 16000, 2000), stab::Error);
}

TEST_CASE("perturbation specs canonicalize and validate") {
  const stab::PerturbationSpec noise(stab::NoiseParams{10.0, 0});
  const stab::PerturbationSpec speed(stab::SpeedParams{0.8});
  CHECK(noise.kind() == "noise");
  CHECK(speed.Canonical() == "speed(factor=0.8)");
  CHECK(noise.DigestHex().size() == 16);
  CHECK(noise.DigestHex() != speed.DigestHex());
  CHECK(noise.DigestHex() == stab::PerturbationSpec(stab::NoiseParams{10.0, 0}).DigestHex());
  CHECK_THROWS_AS(stab::PerturbationSpec(stab::SpeedParams{0.0}), stab::Error);
  CHECK_THROWS_AS(stab::PerturbationSpec(stab::CropParams{-1.0, 4.0}), stab::Error);

  const auto x = Tone(200.0, 5.0, 16000);
  const auto a = stab::ApplyPerturbation(x, 16000, noise, "utt-a");
  const auto b = stab::ApplyPerturbation(x, 16000, noise, "utt-b");
  CHECK(a.size() == x.size());
  CHECK(a != b);
  CHECK(stab::ApplyPerturbation(x, 16000, stab::PerturbationSpec(stab::CropParams{0.0, 4.0}), "u").size() ==
        64000);
}
