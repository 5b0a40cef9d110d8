// src/suites.cc

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

#include "stab/suites.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "stab/compress.h"
#include "stab/parallel.h"
#include "stab/wav.h"

namespace stab {
namespace {

constexpr std::string_view kCleanKey = "clean";

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string Key(const std::optional<PerturbationSpec>& spec) {
  return spec ? spec->DigestHex() : std::string(kCleanKey);
}

DimensionEntry MakeEntry(std::string_view name, std::string label = {}) {
  const DimensionInfo* info = FindDimension(name);
  DimensionEntry e;
  e.name = std::string(name);
  e.label = label.empty() ? std::string(info->label) : std::move(label);
  e.unit = info->unit;
  return e;
}

// Macro mean of per-item chrF plus pooled statistics for the micro value.
class ChrfAccumulator {
 public:
  explicit ChrfAccumulator(const ChrfConfig& cfg) : cfg_(cfg), pooled_(cfg.max_order) {}

  double Add(std::span<const TokenId> hyp, std::span<const TokenId> ref) {
    ChrfStats stats = ComputeChrfStats(hyp, ref, cfg_.max_order);
    const double score = ChrfFromStats(stats, cfg_.beta);
    pooled_ += stats;
    return score;
  }
  const ChrfStats& pooled() const { return pooled_; }
  double micro() const { return ChrfFromStats(pooled_, cfg_.beta); }

 private:
  ChrfConfig cfg_;
  ChrfStats pooled_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void Finish(DimensionEntry& e, double sum, std::uint64_t n, std::optional<double> micro,
            std::string empty_reason) {
  e.n_items = n;
  if (n == 0) {
    e.reason = std::move(empty_reason);
    return;
  }
  e.value = sum / static_cast<double>(n);
  e.micro = micro;
}

}  // namespace

void SuiteConfig::Validate() const {
  if (!(context_len_s > 0.0)) throw Error("context_len_s must be positive");
  if (utilization_budget == 0) throw Error("utilization budget must be positive");
  if (pivot_language.empty()) throw Error("pivot language must not be empty");
  chrf.Validate();
  noise();
  speed();
  pitch();
  crop();
  if (!(speed_factor >= 0.25 && speed_factor <= 4.0)) throw Error("speed factor must lie in [0.25, 4]");
  if (!(std::abs(pitch_semitones) <= 12.0)) throw Error("pitch shift must be within 12 semitones");
}

Digest SuiteConfig::digest() const {
  Hasher h;
  h.Str("stab-suite-config-v1")
      .F64(snr_db)
      .F64(speed_factor)
      .F64(pitch_semitones)
      .F64(context_len_s)
      .U64(utilization_budget)
      .U64(static_cast<std::uint64_t>(chrf.max_order))
      .F64(chrf.beta)
      .U64(bpe_merges ? 1 : 0)
      .U64(bpe_merges.value_or(0))
      .Str(pivot_language)
      .U64(seed)
      .U64(min_language_tokens);
  return h.digest();
}

Suite ParseSuite(std::string_view name) {
  if (name == "invariance") return Suite::kInvariance;
  if (name == "robustness") return Suite::kRobustness;
  if (name == "compressibility") return Suite::kCompressibility;
  if (name == "vocabulary") return Suite::kVocabulary;
  if (name == "all") return Suite::kAll;
  throw Error("unknown suite \"" + std::string(name) +
              "\" (expected invariance, robustness, compressibility, vocabulary or all)");
}

std::string_view SuiteName(Suite suite) {
  switch (suite) {
    case Suite::kInvariance:
      return "invariance";
    case Suite::kRobustness:
      return "robustness";
    case Suite::kCompressibility:
      return "compressibility";
    case Suite::kVocabulary:
      return "vocabulary";
    case Suite::kAll:
      return "all";
  }
  return "?";
}

SuiteRunner::SuiteRunner(const CorpusManifest& corpus, Tokenizer& tokenizer, SuiteConfig config,
                         RunOptions options)
    : corpus_(corpus), tokenizer_(tokenizer), config_(std::move(config)), options_(std::move(options)) {
  config_.Validate();
  tokenizer_.descriptor().Validate();
  if (corpus_.utterances.empty()) throw Error("corpus has no utterances");
}

void SuiteRunner::Prepare(const std::vector<std::optional<PerturbationSpec>>& specs) {
  std::vector<std::optional<PerturbationSpec>> todo;
  std::vector<std::string> keys;
  for (const auto& spec : specs) {
    std::string key = Key(spec);
    if (variants_.count(key) || std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
    todo.push_back(spec);
    keys.push_back(std::move(key));
  }
  if (todo.empty()) return;
  const Stopwatch watch;

  struct Slot {
    std::optional<std::vector<TokenId>> tokens;
    std::string skip;
    double clipped = 0.0;
    bool violation = false;
  };
  const std::size_t n = corpus_.utterances.size();
  const int rate = corpus_.sample_rate_hz;
  const bool need_audio = tokenizer_.needs_audio();
  const double frame_rate = tokenizer_.descriptor().frame_rate_hz;
  std::vector<std::vector<Slot>> slots(todo.size(), std::vector<Slot>(n));

  ParallelFor(n, options_.workers, [&](std::size_t i) {
    const UtteranceRecord& u = corpus_.utterances[i];
    std::vector<float> audio;
    if (need_audio) audio = ReadWav(u.audio_path, rate);
    const double duration =
        need_audio ? static_cast<double>(audio.size()) / rate : u.duration_s;
    for (std::size_t v = 0; v < todo.size(); ++v) {
      Slot& slot = slots[v][i];
      const auto& spec = todo[v];
      AudioInput in;
      in.rate_hz = rate;
      in.utterance_id = u.utterance_id;
      in.perturbation = keys[v];
      std::vector<float> perturbed;
      if (!spec) {
        in.samples = audio;
        in.path = u.audio_path;
      } else {
        if (spec->kind() == "crop" && duration < config_.context_len_s) {
          slot.skip = "shorter than the context length";
          continue;
        }
        if (need_audio) {
          try {
            perturbed = ApplyPerturbation(audio, rate, *spec, u.utterance_id, &slot.clipped);
          } catch (const Error& e) {
            slot.skip = e.what();
            continue;
          }
          in.samples = perturbed;
          if (options_.dump_audio_dir) {
            const auto dir = *options_.dump_audio_dir / (std::string(spec->kind()) + "-" + keys[v]);
            std::filesystem::create_directories(dir);
            WriteWav(dir / (u.utterance_id + ".wav"), perturbed, rate);
          }
        }
      }
      TokenSequence seq;
      try {
        seq = tokenizer_.Tokenize(in);
      } catch (const Error& e) {
        throw Error("tokenizing " + u.utterance_id + " (" + keys[v] + "): " + e.what());
      }
      if (!spec) {
        const double expected = duration * frame_rate;
        slot.violation = std::abs(static_cast<double>(seq.tokens.size()) - expected) > 2.0;
      }
      slot.tokens = std::move(seq.tokens);
    }
  });

  for (std::size_t v = 0; v < todo.size(); ++v) {
    VariantTokens vt;
    vt.tokens.reserve(n);
    double clipped_sum = 0.0;
    std::uint64_t produced = 0;
    for (auto& slot : slots[v]) {
      if (!slot.skip.empty()) {
        ++vt.skipped;
        ++vt.skip_reasons[slot.skip];
      } else {
        ++produced;
        clipped_sum += slot.clipped;
      }
      if (slot.violation) ++vt.length_contract_violations;
      vt.tokens.push_back(std::move(slot.tokens));
    }
    if (produced > 0) vt.mean_clipped_fraction = clipped_sum / static_cast<double>(produced);
    variants_[keys[v]] = std::move(vt);
  }
  std::string label = "tokenize";
  for (const auto& spec : todo) label += std::string(" ") + (spec ? spec->Canonical() : "clean");
  timings_.emplace_back(std::move(label), watch.seconds());
}

const VariantTokens& SuiteRunner::Variant(const std::optional<PerturbationSpec>& spec) {
  Prepare({spec});
  return variants_.at(Key(spec));
}

std::vector<SuiteRunner::LanguageSlice> SuiteRunner::CleanByLanguage() {
  const VariantTokens& clean = Variant(std::nullopt);
  std::vector<LanguageSlice> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < corpus_.utterances.size(); ++i) {
    const std::string& lang = corpus_.utterances[i].language;
    auto [it, inserted] = index.emplace(lang, out.size());
    if (inserted) out.push_back({lang, {}});
    out[it->second].second.push_back(*clean.tokens[i]);
  }
  return out;
}

std::vector<DimensionEntry> SuiteRunner::RunInvariance() {
  Prepare({std::nullopt, config_.crop()});
  const VariantTokens& clean = Variant(std::nullopt);
  const auto& utts = corpus_.utterances;
  std::vector<DimensionEntry> out;

  {
    const Stopwatch watch;
    DimensionEntry e = MakeEntry("speaker_invariance");
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < utts.size(); ++i) groups[{utts[i].language, utts[i].text_id}].push_back(i);
    ChrfAccumulator acc(config_.chrf);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (const auto& [key, members] : groups) {
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const auto& ua = utts[members[a]];
          const auto& ub = utts[members[b]];
          if (ua.speaker_id == ub.speaker_id) continue;
          sum += acc.Add(*clean.tokens[members[a]], *clean.tokens[members[b]]);
          ++n;
        }
      }
    }
    Finish(e, sum, n, acc.micro(),
           "no utterance pair shares language and text with different speakers");
    timings_.emplace_back(e.name, watch.seconds());
    out.push_back(std::move(e));
  }

  {
    const Stopwatch watch;
    DimensionEntry e = MakeEntry("context_invariance",
                                 "Context Invariance (" + Num(config_.context_len_s) + " s)");
    const VariantTokens& crop = Variant(config_.crop());
    const auto prefix_len = static_cast<std::size_t>(
        std::llround(config_.context_len_s * tokenizer_.descriptor().frame_rate_hz));
    ChrfAccumulator acc(config_.chrf);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      if (!crop.tokens[i]) continue;
      const auto& full = *clean.tokens[i];
      const std::span<const TokenId> prefix(full.data(), std::min(prefix_len, full.size()));
      sum += acc.Add(*crop.tokens[i], prefix);
      ++n;
    }
    e.skipped = crop.skipped;
    Finish(e, sum, n, acc.micro(), "no utterance reaches the context length");
    if (clean.length_contract_violations > 0) {
      e.diagnostics["length_contract_violations"] =
          static_cast<double>(clean.length_contract_violations);
      e.notes.push_back(std::to_string(clean.length_contract_violations) +
                        " clean sequences deviate from duration x frame rate by more than 2 tokens");
    }
    timings_.emplace_back(e.name, watch.seconds());
    out.push_back(std::move(e));
  }

  {
    const Stopwatch watch;
    DimensionEntry e = MakeEntry("language_invariance");
    const std::string& pivot = config_.pivot_language;
    std::map<std::string, std::vector<std::size_t>> pivot_by_text;
    std::vector<std::string> languages;
    std::map<std::string, std::map<std::string, std::vector<std::size_t>>> by_lang_text;
    for (std::size_t i = 0; i < utts.size(); ++i) {
      const auto& u = utts[i];
      if (u.language == pivot) {
        pivot_by_text[u.text_id].push_back(i);
        continue;
      }
      if (!by_lang_text.count(u.language)) languages.push_back(u.language);
      by_lang_text[u.language][u.text_id].push_back(i);
    }
    ChrfAccumulator acc(config_.chrf);
    double lang_sum = 0.0;
    std::uint64_t items = 0, skipped = 0, scored_languages = 0;
    for (const auto& lang : languages) {
      double text_sum = 0.0;
      std::uint64_t texts = 0;
      for (const auto& [text, members] : by_lang_text[lang]) {
        auto it = pivot_by_text.find(text);
        if (it == pivot_by_text.end()) {
          ++skipped;
          continue;
        }
        double pair_sum = 0.0;
        for (std::size_t a : members) {
          for (std::size_t b : it->second) pair_sum += acc.Add(*clean.tokens[a], *clean.tokens[b]);
        }
        text_sum += pair_sum / static_cast<double>(members.size() * it->second.size());
        ++texts;
      }
      if (texts == 0) continue;
      e.diagnostics[lang] = text_sum / static_cast<double>(texts);
      lang_sum += text_sum / static_cast<double>(texts);
      ++scored_languages;
      items += texts;
    }
    e.skipped = skipped;
    e.n_items = items;
    if (pivot_by_text.empty()) {
      e.reason = "pivot language \"" + pivot + "\" absent from the corpus";
    } else if (scored_languages == 0) {
      e.reason = "no non-pivot utterance shares a text with the pivot language";
    } else {
      e.value = lang_sum / static_cast<double>(scored_languages);
      e.micro = acc.micro();
    }
    timings_.emplace_back(e.name, watch.seconds());
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<DimensionEntry> SuiteRunner::RunRobustness() {
  const std::vector<std::pair<std::string, PerturbationSpec>> perts = {
      {"pitch_change", config_.pitch()},
      {"gaussian_noise", config_.noise()},
      {"speed_change", config_.speed()},
  };
  Prepare({std::nullopt, perts[0].second, perts[1].second, perts[2].second});
  const VariantTokens& clean = Variant(std::nullopt);
  std::vector<DimensionEntry> out;
  for (const auto& [name, spec] : perts) {
    const Stopwatch watch;
    std::string label;
    if (name == "pitch_change") {
      label = std::string("Pitch Change (") + (config_.pitch_semitones >= 0 ? "+" : "") +
              Num(config_.pitch_semitones) + " st)";
    } else if (name == "gaussian_noise") {
      label = "Gaussian Noise (" + Num(config_.snr_db) + " dB)";
    } else {
      label = "Speed Change (x" + Num(config_.speed_factor) + ")";
    }
    DimensionEntry e = MakeEntry(name, label);
    const VariantTokens& pert = Variant(spec);
    ChrfAccumulator acc(config_.chrf);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < corpus_.utterances.size(); ++i) {
      if (!pert.tokens[i]) continue;
      sum += acc.Add(*pert.tokens[i], *clean.tokens[i]);
      ++n;
    }
    e.skipped = pert.skipped;
    for (const auto& [reason, count] : pert.skip_reasons) {
      e.notes.push_back(std::to_string(count) + " skipped: " + reason);
    }
    if (name == "gaussian_noise" && tokenizer_.needs_audio()) {
      e.diagnostics["mean_clipped_fraction"] = pert.mean_clipped_fraction;
    }
    Finish(e, sum, n, acc.micro(), "every utterance failed the perturbation");
    timings_.emplace_back(e.name, watch.seconds());
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<DimensionEntry> SuiteRunner::RunCompressibility() {
  const auto slices = CleanByLanguage();
  const std::size_t vocab = tokenizer_.descriptor().vocab_size;
  const std::size_t merges = config_.bpe_merges.value_or(vocab);
  DimensionEntry huff = MakeEntry("huffman_efficiency");
  DimensionEntry bpe = MakeEntry("bpe_efficiency", "Byte-pair Efficiency (" + std::to_string(merges) + " merges)");
  DimensionEntry dedup = MakeEntry("dedup_efficiency");
  std::vector<std::string> eligible;
  std::vector<std::size_t> eligible_idx;
  std::uint64_t skipped = 0;
  for (std::size_t li = 0; li < slices.size(); ++li) {
    std::uint64_t total = 0;
    for (const auto& s : slices[li].second) total += s.size();
    if (total < config_.min_language_tokens) {
      ++skipped;
      for (auto* e : {&huff, &bpe, &dedup}) {
        e->notes.push_back(slices[li].first + " skipped: " + std::to_string(total) + " tokens < " +
                           std::to_string(config_.min_language_tokens));
      }
      continue;
    }
    eligible_idx.push_back(li);
  }
  std::vector<double> h(eligible_idx.size()), b(eligible_idx.size()), d(eligible_idx.size());
  auto timed = [&](const DimensionEntry& e, std::vector<double>& out, auto metric) {
    const Stopwatch watch;
    ParallelFor(eligible_idx.size(), options_.workers,
                [&](std::size_t k) { out[k] = metric(slices[eligible_idx[k]].second); });
    timings_.emplace_back(e.name, watch.seconds());
  };
  timed(huff, h, [&](Corpus seqs) { return HuffmanEfficiency(seqs, vocab); });
  timed(bpe, b, [&](Corpus seqs) { return BpeEfficiency(seqs, merges); });
  timed(dedup, d, [&](Corpus seqs) { return DedupEfficiency(seqs); });
  double hs = 0, bs = 0, ds = 0;
  for (std::size_t k = 0; k < eligible_idx.size(); ++k) {
    const std::string& lang = slices[eligible_idx[k]].first;
    huff.diagnostics[lang] = h[k];
    bpe.diagnostics[lang] = b[k];
    dedup.diagnostics[lang] = d[k];
    hs += h[k];
    bs += b[k];
    ds += d[k];
  }
  const std::uint64_t n = eligible_idx.size();
  const std::string reason = "no language reaches " + std::to_string(config_.min_language_tokens) + " tokens";
  for (auto [e, sum] : {std::pair{&huff, hs}, std::pair{&bpe, bs}, std::pair{&dedup, ds}}) {
    e->skipped = skipped;
    Finish(*e, sum, n, std::nullopt, reason);
  }
  return {huff, bpe, dedup};
}

std::vector<DimensionEntry> SuiteRunner::RunVocabulary() {
  const auto slices = CleanByLanguage();
  const std::size_t vocab = tokenizer_.descriptor().vocab_size;
  const std::uint64_t budget = config_.utilization_budget;
  const Stopwatch watch;
  DimensionEntry per = MakeEntry("per_language_utilization");
  DimensionEntry overall = MakeEntry("overall_utilization");
  DimensionEntry entropy = MakeEntry("vocabulary_entropy");
  FrequencyTable pooled(vocab);
  std::set<TokenId> union_ids;
  double sum = 0.0;
  distributions_.clear();
  for (const auto& [lang, seqs] : slices) {
    const FrequencyTable counts = BudgetedCounts(seqs, vocab, budget);
    const Utilization u = ComputeUtilization(seqs, vocab, budget);
    per.diagnostics[lang] = u.percent;
    sum += u.percent;
    if (u.under_budget) {
      per.notes.push_back(lang + " under budget: " + std::to_string(u.tokens_observed) + " of " +
                          std::to_string(budget) + " tokens");
    }
    for (const auto& [id, c] : counts.counts) union_ids.insert(id);
    pooled += counts;
    distributions_[lang] = LanguageCounts{counts.total, counts.counts};
  }
  const std::uint64_t n = slices.size();
  Finish(per, sum, n, std::nullopt, "corpus has no languages");
  overall.n_items = n;
  overall.value = 100.0 * static_cast<double>(union_ids.size()) / static_cast<double>(vocab);
  entropy.n_items = n;
  entropy.value = EntropyScore(pooled);
  timings_.emplace_back("per_language_utilization, overall_utilization, vocabulary_entropy",
                        watch.seconds());
  return {per, overall, entropy};
}

MetricReport SuiteRunner::Run(Suite suite, std::vector<std::pair<std::string, double>>* timings) {
  MetricReport report;
  report.tool_version = std::string(kToolVersion);
  report.tokenizer = tokenizer_.descriptor();
  report.corpus_id = corpus_.corpus_id;
  report.corpus_digest = HexDigest(ManifestDigest(corpus_));
  report.config_digest = HexDigest(config_.digest());
  report.suite = std::string(SuiteName(suite));
  auto append = [&](std::vector<DimensionEntry> entries) {
    for (auto& e : entries) report.dimensions.push_back(std::move(e));
  };

  timings_.clear();
  if (suite == Suite::kAll) {
    // One pass over the audio for every variant any suite needs.
    Prepare({std::nullopt, config_.crop(), config_.pitch(), config_.noise(), config_.speed()});
  }
  if (suite == Suite::kAll || suite == Suite::kInvariance) append(RunInvariance());
  if (suite == Suite::kAll || suite == Suite::kRobustness) append(RunRobustness());
  if (suite == Suite::kAll || suite == Suite::kCompressibility) append(RunCompressibility());
  if (suite == Suite::kAll || suite == Suite::kVocabulary) append(RunVocabulary());
  if (timings) *timings = timings_;
  report.language_distributions = distributions_;
  return report;
}

}  // namespace stab
