// src/synth.cc

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

#include "stab/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <system_error>

#include "stab/base.h"
#include "stab/parallel.h"
#include "stab/wav.h"

namespace stab {
namespace fs = std::filesystem;

namespace {

constexpr int kUnits = 24;          // concrete syllable inventory
constexpr int kAbstractUnits = 16;  // language-independent syllable ids
constexpr double kPeak = 0.5;

struct Unit {
  std::array<double, 3> formants;
  double f0_slope;
  double weight;  // relative syllable length
};

struct Speaker {
  double f0;
  double formant_scale;
  double tilt_db_per_octave;
};

Rng FactorRng(std::uint64_t seed, std::string_view kind, int index) {
  return Rng(Hasher().U64(seed).Str(kind).U64(static_cast<std::uint64_t>(index)).digest());
}

Unit MakeUnit(std::uint64_t seed, int u) {
  Rng rng = FactorRng(seed, "unit", u);
  Unit unit;
  unit.formants = {rng.Uniform(300, 850), rng.Uniform(900, 2300), rng.Uniform(2400, 3300)};
  unit.f0_slope = rng.Uniform(-0.15, 0.15);
  unit.weight = rng.Uniform(0.7, 1.3);
  return unit;
}

Speaker MakeSpeaker(std::uint64_t seed, int s) {
  Rng rng = FactorRng(seed, "speaker", s);
  return {rng.Uniform(90, 260), rng.Uniform(0.88, 1.15), rng.Uniform(-9, -4)};
}

std::vector<int> MakeText(std::uint64_t seed, int t) {
  Rng rng = FactorRng(seed, "text", t);
  const int n = 5 + static_cast<int>(rng.UniformInt(8));  // 5..12 syllables
  std::vector<int> ids(n);
  for (auto& id : ids) id = static_cast<int>(rng.UniformInt(kAbstractUnits));
  return ids;
}

// Language 0 realizes abstract ids directly; other languages keep about half
// of the mapping and substitute the rest, so parallel texts stay related.
int Realize(std::uint64_t seed, int language, int abstract_id) {
  if (language == 0) return abstract_id;
  Rng rng = Rng(Hasher().U64(seed).Str("lexicon").U64(language).U64(abstract_id).digest());
  if (rng.Uniform() < 0.5) return abstract_id;
  return static_cast<int>(rng.UniformInt(kUnits));
}

double HarmonicGain(double freq, const Unit& unit, const Speaker& spk) {
  static constexpr std::array<double, 3> kGain = {1.0, 0.6, 0.3};
  static constexpr std::array<double, 3> kBandwidth = {90.0, 110.0, 150.0};
  double g = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = (freq - unit.formants[i] * spk.formant_scale) / kBandwidth[i];
    g += kGain[i] / (1.0 + d * d);
  }
  const double octaves = std::log2(std::max(freq, 1.0) / 100.0);
  return g * std::pow(10.0, spk.tilt_db_per_octave * octaves / 20.0);
}

void RenderBurst(std::span<float> out, int rate_hz, const Unit& unit,
                 const Speaker& spk) {
  const std::size_t n = out.size();
  if (n == 0) return;
  const double max_freq = std::min(5000.0, 0.45 * rate_hz);
  const int n_harm = std::max(1, static_cast<int>(max_freq / (spk.f0 * 1.2)));
  std::vector<double> gain(n_harm + 1, 0.0);
  for (int k = 1; k <= n_harm; ++k) gain[k] = HarmonicGain(k * spk.f0, unit, spk);

  const std::size_t ramp = std::min<std::size_t>(n / 2, rate_hz / 50);  // 20 ms
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = static_cast<double>(i) / n;
    const double f0 = spk.f0 * (1.0 + unit.f0_slope * (tau - 0.5));
    phase += 2.0 * std::numbers::pi * f0 / rate_hz;
    if (phase > 2.0 * std::numbers::pi) phase -= 2.0 * std::numbers::pi;
    // sin(k*phase) by Chebyshev recurrence.
    const double c2 = 2.0 * std::cos(phase);
    double s_prev = 0.0, s_cur = std::sin(phase), acc = 0.0;
    for (int k = 1; k <= n_harm; ++k) {
      if (k * f0 < max_freq) acc += gain[k] * s_cur;
      const double s_next = c2 * s_cur - s_prev;
      s_prev = s_cur;
      s_cur = s_next;
    }
    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * i / ramp);
    if (n - 1 - i < ramp) env = 0.5 - 0.5 * std::cos(std::numbers::pi * (n - 1 - i) / ramp);
    out[i] = static_cast<float>(acc * env);
  }
}

std::string UtteranceId(int language, int speaker, int text) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_s%02d_t%04d", SyntheticLanguageTag(language).c_str(),
                speaker, text);
  return buf;
}

}  // namespace

void SynthesisConfig::Validate() const {
  if (n_languages < 1 || n_speakers < 1 || n_texts < 1)
    throw Error("synthesis counts must be >= 1");
  if (!(utterance_duration_s >= 4.5))
    throw Error("utterance_duration_s must be >= 4.5 s");
  if (sample_rate_hz < 8000) throw Error("sample_rate_hz must be >= 8000");
}

std::string SyntheticLanguageTag(int index) {
  static constexpr std::array<const char*, 12> kTags = {
      "en", "de", "fr", "es", "it", "nl", "pt", "sv", "da", "pl", "cs", "fi"};
  if (index >= 0 && index < static_cast<int>(kTags.size())) return kTags[index];
  return "x" + std::to_string(index);
}

std::vector<float> SynthesizeUtterance(const SynthesisConfig& cfg, int language,
                                       int speaker, int text) {
  cfg.Validate();
  const Speaker spk = MakeSpeaker(cfg.seed, speaker);
  const std::vector<int> ids = MakeText(cfg.seed, text);
  std::vector<Unit> units;
  double total_weight = 0.0;
  for (int a : ids) {
    units.push_back(MakeUnit(cfg.seed, Realize(cfg.seed, language, a)));
    total_weight += units.back().weight;
  }
  const auto n = static_cast<std::size_t>(std::lround(cfg.utterance_duration_s * cfg.sample_rate_hz));
  std::vector<float> audio(n, 0.0f);
  // 100 ms of leading and trailing silence; bursts fill 80% of their slot.
  const double lead = 0.1 * cfg.sample_rate_hz;
  const double usable = static_cast<double>(n) - 2.0 * lead;
  double cursor = lead;
  for (const Unit& unit : units) {
    const double slot = usable * unit.weight / total_weight;
    const auto begin = static_cast<std::size_t>(cursor + 0.1 * slot);
    const auto end = std::min(n, static_cast<std::size_t>(cursor + 0.9 * slot));
    RenderBurst(std::span<float>(audio).subspan(begin, end - begin), cfg.sample_rate_hz,
                unit, spk);
    cursor += slot;
  }
  float peak = 0.0f;
  for (float v : audio) peak = std::max(peak, std::abs(v));
  if (peak > 0.0f) {
    const float scale = static_cast<float>(kPeak) / peak;
    for (float& v : audio) v *= scale;
  }
  return audio;
}

CorpusManifest SynthesizeCorpus(const SynthesisConfig& cfg, const fs::path& out_dir,
                                int workers) {
  cfg.Validate();
  std::error_code ec;
  fs::create_directories(out_dir / "wav", ec);
  if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());

  CorpusManifest m;
  m.corpus_id = "synthetic-" + HexDigest(Hasher()
                                             .U64(cfg.seed)
                                             .U64(cfg.n_languages)
                                             .U64(cfg.n_speakers)
                                             .U64(cfg.n_texts)
                                             .F64(cfg.utterance_duration_s)
                                             .U64(cfg.sample_rate_hz)
                                             .digest());
  m.sample_rate_hz = cfg.sample_rate_hz;
  const fs::path wav_dir = fs::absolute(out_dir / "wav").lexically_normal();
  for (int l = 0; l < cfg.n_languages; ++l) {
    for (int t = 0; t < cfg.n_texts; ++t) {
      for (int s = 0; s < cfg.n_speakers; ++s) {
        UtteranceRecord r;
        r.utterance_id = UtteranceId(l, s, t);
        r.audio_path = wav_dir / (r.utterance_id + ".wav");
        r.language = SyntheticLanguageTag(l);
        r.speaker_id = "spk" + std::to_string(s);
        char text_id[16];
        std::snprintf(text_id, sizeof text_id, "t%04d", t);
        r.text_id = text_id;
        r.duration_s = std::lround(cfg.utterance_duration_s * cfg.sample_rate_hz) /
                       static_cast<double>(cfg.sample_rate_hz);
        m.utterances.push_back(std::move(r));
      }
    }
  }
  ParallelFor(m.utterances.size(), workers, [&](std::size_t i) {
    const int per_lang = cfg.n_texts * cfg.n_speakers;
    const int l = static_cast<int>(i) / per_lang;
    const int t = (static_cast<int>(i) % per_lang) / cfg.n_speakers;
    const int s = static_cast<int>(i) % cfg.n_speakers;
    WriteWav(m.utterances[i].audio_path, SynthesizeUtterance(cfg, l, s, t), cfg.sample_rate_hz);
  });
  WriteManifest(out_dir / "manifest.jsonl", m);
  return m;
}

}  // namespace stab
