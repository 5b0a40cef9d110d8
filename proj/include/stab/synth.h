// include/stab/synth.h

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

#ifndef STAB_SYNTH_H_
#define STAB_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stab/manifest.h"

namespace stab {

struct SynthesisConfig {
  int n_languages = 2;
  int n_speakers = 2;
  int n_texts = 5;
  double utterance_duration_s = 4.5;
  std::uint64_t seed = 0;
  int sample_rate_hz = 16000;

  void Validate() const;
};

// Language tags used for synthesized corpora. Index 0 is "en", the default
// pivot language of the invariance suite.
std::string SyntheticLanguageTag(int index);

// Renders one utterance without touching the filesystem.
std::vector<float> SynthesizeUtterance(const SynthesisConfig& cfg, int language,
                                       int speaker, int text);

// Writes <out_dir>/wav/<utterance_id>.wav for every (language, text, speaker)
// combination plus <out_dir>/manifest.jsonl, in that nesting order.
CorpusManifest SynthesizeCorpus(const SynthesisConfig& cfg,
                                const std::filesystem::path& out_dir,
                                int workers = 1);

}  // namespace stab

#endif  // STAB_SYNTH_H_
