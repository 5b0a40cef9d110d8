// include/stab/suites.h

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

#ifndef STAB_SUITES_H_
#define STAB_SUITES_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stab/chrf.h"
#include "stab/dsp.h"
#include "stab/manifest.h"
#include "stab/report.h"
#include "stab/tokenizer.h"
#include "stab/vocab.h"

namespace stab {

struct SuiteConfig {
  double snr_db = 10.0;
  double speed_factor = 0.8;
  double pitch_semitones = 2.0;
  double context_len_s = 4.0;
  std::uint64_t utilization_budget = kDefaultTokenBudget;
  ChrfConfig chrf;
  std::optional<std::size_t> bpe_merges;  // defaults to the vocabulary size
  std::string pivot_language = "en";
  std::uint64_t seed = 0;
  std::uint64_t min_language_tokens = 1000;

  void Validate() const;
  Digest digest() const;

  PerturbationSpec noise() const { return PerturbationSpec(NoiseParams{snr_db, seed}); }
  PerturbationSpec speed() const { return PerturbationSpec(SpeedParams{speed_factor}); }
  PerturbationSpec pitch() const { return PerturbationSpec(PitchParams{pitch_semitones}); }
  PerturbationSpec crop() const { return PerturbationSpec(CropParams{0.0, context_len_s}); }
};

enum class Suite { kInvariance, kRobustness, kCompressibility, kVocabulary, kAll };
Suite ParseSuite(std::string_view name);
std::string_view SuiteName(Suite suite);

struct RunOptions {
  int workers = 1;
  std::optional<std::filesystem::path> dump_audio_dir;
};

// Token sequences for one variant of the corpus, aligned with the manifest.
// An empty optional marks an utterance whose perturbation was skipped.
struct VariantTokens {
  std::vector<std::optional<std::vector<TokenId>>> tokens;
  std::uint64_t skipped = 0;
  std::map<std::string, std::uint64_t> skip_reasons;
  double mean_clipped_fraction = 0.0;
  std::uint64_t length_contract_violations = 0;
};

class SuiteRunner {
 public:
  SuiteRunner(const CorpusManifest& corpus, Tokenizer& tokenizer, SuiteConfig config,
              RunOptions options = {});

  std::vector<DimensionEntry> RunInvariance();
  std::vector<DimensionEntry> RunRobustness();
  std::vector<DimensionEntry> RunCompressibility();
  std::vector<DimensionEntry> RunVocabulary();

  // Runs the requested suite and fills the report header. When `timings` is
  // given it receives wall times in seconds for tokenization passes and for
  // each dimension.
  MetricReport Run(Suite suite, std::vector<std::pair<std::string, double>>* timings = nullptr);

  // Tokens for the clean corpus (nullopt spec) or a perturbed variant.
  // Variants requested together share one audio load per utterance.
  const VariantTokens& Variant(const std::optional<PerturbationSpec>& spec);
  void Prepare(const std::vector<std::optional<PerturbationSpec>>& specs);

 private:
  using LanguageSlice = std::pair<std::string, std::vector<std::vector<TokenId>>>;
  // Clean token sequences grouped by language in first-appearance order.
  std::vector<LanguageSlice> CleanByLanguage();

  const CorpusManifest& corpus_;
  Tokenizer& tokenizer_;
  SuiteConfig config_;
  RunOptions options_;
  std::map<std::string, VariantTokens> variants_;  // keyed by perturbation digest
  std::map<std::string, LanguageCounts> distributions_;
  std::vector<std::pair<std::string, double>> timings_;
};

}  // namespace stab

#endif  // STAB_SUITES_H_
