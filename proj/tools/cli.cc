// tools/cli.cc

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

#include "cli.h"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "stab/analysis.h"
#include "stab/manifest.h"
#include "stab/pretokenized.h"
#include "stab/reference_tokenizer.h"
#include "stab/report.h"
#include "stab/subprocess_tokenizer.h"
#include "stab/suites.h"
#include "stab/synth.h"
#include "stab/token_cache.h"

namespace stab {
namespace {

namespace fs = std::filesystem;

std::string Trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string Seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

void EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error("cannot create output directory " + dir.string() +
                (ec ? " (" + ec.message() + ")" : ""));
  }
}

// Writes every file to a sibling temporary first and renames them only once
// all writes succeeded.
void WriteFilesAtomically(const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<fs::path> temps;
  for (const auto& [path, content] : files) {
    fs::path tmp = path;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) {
      for (const auto& t : temps) fs::remove(t);
      throw Error("cannot write " + path.string());
    }
    temps.push_back(tmp);
  }
  for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], files[i].first);
}

std::string FileSafe(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return s;
}

struct TokenizerArgs {
  std::string model;
  std::string tokens;
  std::string tokenizer_id;
  std::size_t vocab_size = 0;
  double frame_rate_hz = 0.0;
  std::string adapter_cmd;
  double adapter_timeout_s = 60.0;
  std::string cache_dir;
  bool no_cache = false;

  void Register(CLI::App* app) {
    app->add_option("--model", model, "Reference tokenizer model written by fit-tokenizer");
    app->add_option("--tokens", tokens, "Pre-tokenized JSON-lines file");
    app->add_option("--tokenizer-id", tokenizer_id, "Tokenizer id for --tokens (default: file stem)");
    app->add_option("--vocab-size", vocab_size, "Vocabulary size for --tokens");
    app->add_option("--frame-rate", frame_rate_hz, "Token rate in Hz for --tokens");
    app->add_option("--adapter-cmd", adapter_cmd, "External tokenizer command speaking the line protocol");
    app->add_option("--adapter-timeout", adapter_timeout_s, "Per-request adapter timeout in seconds")
        ->check(CLI::PositiveNumber);
    app->add_option("--cache", cache_dir, "Token cache directory")->envname("STAB_CACHE_DIR");
    app->add_flag("--no-cache", no_cache, "Disable the token cache");
  }
};

// Owns the adapter and the optional cache layered over it.
struct TokenizerStack {
  std::unique_ptr<Tokenizer> base;
  std::unique_ptr<TokenCache> cache;
  std::unique_ptr<CachingTokenizer> caching;

  Tokenizer& get() { return caching ? static_cast<Tokenizer&>(*caching) : *base; }
};

TokenizerStack MakeTokenizer(const TokenizerArgs& a, int workers) {
  const int chosen = !a.model.empty() + !a.tokens.empty() + !a.adapter_cmd.empty();
  if (chosen != 1) throw Error("give exactly one of --model, --tokens or --adapter-cmd");
  TokenizerStack s;
  if (!a.model.empty()) {
    s.base = std::make_unique<ReferenceTokenizer>(LoadReferenceModel(a.model));
  } else if (!a.tokens.empty()) {
    TokenizerDescriptor desc;
    desc.tokenizer_id = a.tokenizer_id.empty() ? fs::path(a.tokens).stem().string() : a.tokenizer_id;
    desc.vocab_size = a.vocab_size;
    desc.frame_rate_hz = a.frame_rate_hz;
    desc.adapter = AdapterKind::kFiles;
    desc.Validate();
    s.base = std::make_unique<FileTokenizer>(desc, PretokenizedIndex::Load(a.tokens, desc));
  } else {
    SubprocessOptions opts;
    opts.command = a.adapter_cmd;
    opts.lanes = workers;
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(a.adapter_timeout_s * 1000.0));
    s.base = std::make_unique<SubprocessTokenizer>(opts);
  }
  if (!a.no_cache && !a.cache_dir.empty() && s.base->needs_audio()) {
    s.cache = std::make_unique<TokenCache>(fs::path(a.cache_dir));
    s.caching = std::make_unique<CachingTokenizer>(*s.base, *s.cache);
  }
  return s;
}

void RegisterSuiteConfig(CLI::App* app, SuiteConfig& c, std::size_t& bpe_merges) {
  app->add_option("--snr-db", c.snr_db, "Gaussian noise SNR in dB");
  app->add_option("--speed", c.speed_factor, "Speed change factor")->check(CLI::Range(0.25, 4.0));
  app->add_option("--pitch", c.pitch_semitones, "Pitch shift in semitones")->check(CLI::Range(-12.0, 12.0));
  app->add_option("--context-len", c.context_len_s, "Context crop length in seconds")
      ->check(CLI::PositiveNumber);
  app->add_option("--budget", c.utilization_budget, "Token budget per language for utilization")
      ->check(CLI::PositiveNumber);
  app->add_option("--bpe-merges", bpe_merges, "BPE merges (default: vocabulary size)");
  app->add_option("--pivot", c.pivot_language, "Pivot language for language invariance");
  app->add_option("--seed", c.seed, "Global seed for stochastic perturbations");
  app->add_option("--chrf-order", c.chrf.max_order, "Maximum chrF n-gram order")->check(CLI::Range(1, 32));
  app->add_option("--chrf-beta", c.chrf.beta, "chrF recall weight")->check(CLI::PositiveNumber);
  app->add_option("--min-language-tokens", c.min_language_tokens,
                  "Languages with fewer clean tokens are skipped by the compressibility suite");
}

int CmdGenCorpus(const SynthesisConfig& cfg, const std::string& out_dir, int workers,
                 std::ostream& out) {
  EnsureDirectory(out_dir);
  const CorpusManifest m = SynthesizeCorpus(cfg, out_dir, workers);
  out << "manifest: " << (fs::path(out_dir) / "manifest.jsonl").string() << '\n'
      << "corpus_id: " << m.corpus_id << '\n'
      << "utterances: " << m.utterances.size() << '\n'
      << "digest: " << HexDigest(ManifestDigest(m)) << '\n';
  return kExitOk;
}

int CmdFit(const std::string& manifest, const ReferenceTokenizerConfig& cfg, const std::string& out_path,
           int workers, std::ostream& out) {
  const CorpusManifest corpus = LoadManifest(manifest);
  KMeansResult details;
  const ReferenceModel model = FitReferenceTokenizer(corpus, cfg, workers, &details);
  const fs::path path(out_path);
  if (path.has_parent_path()) EnsureDirectory(path.parent_path());
  SaveReferenceModel(path, model);
  out << "model: " << path.string() << '\n'
      << "tokenizer_id: " << model.descriptor().tokenizer_id << '\n'
      << "digest: " << HexDigest(model.digest()) << '\n'
      << "iterations: " << details.iterations << (details.converged ? " (converged)" : " (iteration cap)")
      << '\n'
      << "inertia: " << (details.inertia_history.empty() ? 0.0 : details.inertia_history.back()) << '\n'
      << "empty_cluster_events: " << details.empty_cluster_events << '\n';
  return kExitOk;
}

std::vector<std::optional<PerturbationSpec>> ParseVariants(const std::string& list, const SuiteConfig& c) {
  std::vector<std::optional<PerturbationSpec>> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item == "clean") {
      out.emplace_back(std::nullopt);
    } else if (item == "noise") {
      out.emplace_back(c.noise());
    } else if (item == "speed") {
      out.emplace_back(c.speed());
    } else if (item == "pitch") {
      out.emplace_back(c.pitch());
    } else if (item == "crop") {
      out.emplace_back(c.crop());
    } else if (item == "all") {
      for (const char* v : {"clean", "crop", "pitch", "noise", "speed"}) {
        for (auto& s : ParseVariants(v, c)) out.push_back(std::move(s));
      }
    } else {
      throw Error("unknown variant \"" + item + "\" (expected clean, crop, pitch, noise, speed or all)");
    }
  }
  if (out.empty()) throw Error("no variants requested");
  return out;
}

int CmdTokenize(const std::string& manifest, TokenizerArgs& targs, const SuiteConfig& cfg,
                const std::string& variants, const std::string& out_path, int workers, std::ostream& out) {
  const CorpusManifest corpus = LoadManifest(manifest);
  TokenizerStack stack = MakeTokenizer(targs, workers);
  SuiteRunner runner(corpus, stack.get(), cfg, RunOptions{workers, std::nullopt});
  const auto specs = ParseVariants(variants, cfg);
  runner.Prepare(specs);
  PretokenizedIndex index;
  std::uint64_t skipped = 0;
  for (const auto& spec : specs) {
    const VariantTokens& v = runner.Variant(spec);
    const std::string key = spec ? spec->DigestHex() : std::string(kCleanPerturbation);
    for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
      if (v.tokens[i]) {
        index.Insert(corpus.utterances[i].utterance_id, key, *v.tokens[i]);
      }
    }
    skipped += v.skipped;
  }
  const fs::path path(out_path);
  if (path.has_parent_path()) EnsureDirectory(path.parent_path());
  index.Write(path);
  const auto& d = stack.get().descriptor();
  out << "tokens: " << path.string() << '\n'
      << "sequences: " << index.size() << " (" << skipped << " skipped)\n"
      << "tokenizer_id: " << d.tokenizer_id << "  vocab_size: " << d.vocab_size
      << "  frame_rate_hz: " << d.frame_rate_hz << '\n';
  for (const auto& spec : specs) {
    if (spec) out << "variant " << spec->Canonical() << " -> " << spec->DigestHex() << '\n';
  }
  return kExitOk;
}

int CmdRun(const std::string& manifest, TokenizerArgs& targs, const SuiteConfig& cfg, const std::string& suite,
           const std::string& out_dir, int workers, const std::string& dump_audio, std::ostream& out) {
  const Suite which = ParseSuite(suite);
  EnsureDirectory(out_dir);
  const CorpusManifest corpus = LoadManifest(manifest);
  TokenizerStack stack = MakeTokenizer(targs, workers);
  RunOptions opts{workers, std::nullopt};
  if (!dump_audio.empty()) opts.dump_audio_dir = dump_audio;
  SuiteRunner runner(corpus, stack.get(), cfg, opts);
  std::vector<std::pair<std::string, double>> timings;
  const auto t0 = std::chrono::steady_clock::now();
  const MetricReport report = runner.Run(which, &timings);
  const std::chrono::duration<double> total = std::chrono::steady_clock::now() - t0;

  const fs::path json_path = fs::path(out_dir) / "report.json";
  const fs::path md_path = fs::path(out_dir) / "report.md";
  WriteFilesAtomically({{json_path, ReportToJson(report)}, {md_path, RenderReportMarkdown(report)}});

  for (const auto& [name, secs] : timings) out << "time " << name << ": " << Seconds(secs) << '\n';
  out << "time total: " << Seconds(total.count()) << '\n';
  if (stack.cache) {
    out << "cache: " << stack.cache->hits() << " hits, " << stack.cache->misses() << " misses\n";
  }
  out << '\n' << RenderTable(std::span<const MetricReport>(&report, 1)) << '\n'
      << "report: " << json_path.string() << '\n'
      << "table: " << md_path.string() << '\n';
  return kExitOk;
}

int CmdCorrelate(const std::vector<std::string>& report_paths, const std::string& downstream_path,
                 const std::string& out_dir, bool force, std::ostream& out, std::ostream& err) {
  if (report_paths.size() < 2) throw Error("correlate needs at least two reports");
  std::vector<MetricReport> reports;
  for (const auto& p : report_paths) reports.push_back(LoadReport(p));
  for (std::size_t i = 1; i < reports.size(); ++i) {
    for (auto [field, a, b] : {std::tuple{"corpus_digest", &reports[0].corpus_digest, &reports[i].corpus_digest},
                               std::tuple{"config_digest", &reports[0].config_digest, &reports[i].config_digest}}) {
      if (*a == *b) continue;
      const std::string msg = std::string(field) + " differs between " + report_paths[0] + " (" + *a +
                              ") and " + report_paths[i] + " (" + *b + ")";
      if (!force) throw Error(msg + "; pass --force to correlate anyway");
      err << "warning: " << msg << '\n';
    }
  }
  const auto downstream = LoadDownstream(downstream_path);
  const CorrelationMatrix m = ComputeCorrelation(reports, downstream);

  EnsureDirectory(out_dir);
  std::vector<std::pair<fs::path, std::string>> files = {
      {fs::path(out_dir) / "correlation.csv", CorrelationCsv(m)},
      {fs::path(out_dir) / "correlation_matrix.csv", CorrelationMatrixCsv(m)},
      {fs::path(out_dir) / "table.md", RenderTable(reports)},
  };
  for (const auto& r : reports) {
    const auto dists = ReportDistributions(r);
    if (dists.size() < 2) continue;
    const SimilarityMatrix s = ComputeSimilarity(dists);
    const std::string id = FileSafe(r.tokenizer.tokenizer_id);
    files.push_back({fs::path(out_dir) / ("similarity_" + id + ".csv"), SimilarityCsv(s.languages, s.cosine)});
    files.push_back({fs::path(out_dir) / ("js_divergence_" + id + ".csv"), SimilarityCsv(s.languages, s.js_divergence)});
  }
  WriteFilesAtomically(files);
  std::size_t emitted = 0;
  for (const auto& row : m.cells) {
    for (const auto& c : row) emitted += c.value.has_value();
  }
  out << "tokenizers: " << m.tokenizers.size() << "  dimensions: " << m.dimensions.size()
      << "  tasks: " << m.tasks.size() << "  cells with a value: " << emitted << '\n'
      << "estimator: " << kCorrelationEstimator << '\n';
  for (const auto& [path, _] : files) out << "wrote " << path.string() << '\n';
  return kExitOk;
}

int CmdImport(const std::string& layout, const std::string& root, const std::vector<std::string>& languages,
              const std::string& split, const std::string& out_path, std::ostream& out) {
  CorpusManifest m;
  if (layout == "fleurs") {
    if (languages.empty()) throw Error("--languages is required for the fleurs layout");
    m = ImportFleurs(root, languages, split);
  } else if (layout == "timit") {
    m = ImportTimit(root);
  } else {
    throw Error("unknown layout \"" + layout + "\" (expected fleurs or timit)");
  }
  const fs::path path(out_path);
  if (path.has_parent_path()) EnsureDirectory(path.parent_path());
  WriteManifest(path, m);
  out << "manifest: " << path.string() << '\n'
      << "utterances: " << m.utterances.size() << '\n'
      << "digest: " << HexDigest(ManifestDigest(m)) << '\n';
  return kExitOk;
}

}  // namespace

std::vector<std::string> ExpandConfigFile(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw Error("--config needs a file argument");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config) return rest;
  std::ifstream in(*config);
  if (!in) throw Error("cannot open config file " + *config);
  std::vector<std::string> expanded;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(*config + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    if (key.empty()) throw Error(*config + ":" + std::to_string(line_no) + ": empty key");
    expanded.push_back("--" + key + "=" + value);
  }
  // Insert after the subcommand so explicit flags, parsed later, win.
  std::size_t pos = 0;
  while (pos < rest.size() && rest[pos].rfind("-", 0) == 0) ++pos;
  if (pos < rest.size()) ++pos;
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(pos), expanded.begin(), expanded.end());
  return rest;
}

int RunCli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speech tokenizer assessment benchmark", "stab"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer("Every subcommand also accepts --config <file> with one key = value per line.");

  int workers = 1;
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", workers, "Parallel workers")->check(CLI::PositiveNumber);
  };

  SynthesisConfig synth;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-corpus", "Synthesize a parallel multi-speaker corpus");
  gen->add_option("--languages", synth.n_languages, "Number of languages")->check(CLI::PositiveNumber);
  gen->add_option("--speakers", synth.n_speakers, "Speakers per language")->check(CLI::PositiveNumber);
  gen->add_option("--texts", synth.n_texts, "Parallel texts")->check(CLI::PositiveNumber);
  gen->add_option("--duration", synth.utterance_duration_s, "Utterance duration in seconds")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", synth.seed, "Synthesis seed");
  gen->add_option("--rate", synth.sample_rate_hz, "Sample rate in Hz");
  gen->add_option("--out", gen_out, "Output directory")->required();
  add_workers(gen);

  ReferenceTokenizerConfig ref;
  std::string fit_manifest, fit_out;
  auto* fit = app.add_subcommand("fit-tokenizer", "Fit the log-mel k-means reference tokenizer");
  fit->add_option("--manifest", fit_manifest, "Corpus manifest")->required();
  fit->add_option("--out", fit_out, "Model file to write")->required();
  fit->add_option("--k", ref.k, "Number of clusters (vocabulary size)");
  fit->add_option("--n-mels", ref.n_mels, "Mel bands");
  fit->add_option("--window-ms", ref.window_ms, "Analysis window in ms");
  fit->add_option("--hop-ms", ref.hop_ms, "Frame hop in ms");
  fit->add_option("--stack", ref.stack, "Frames stacked per token");
  fit->add_option("--kmeans-seed", ref.kmeans_seed, "k-means++ seed");
  fit->add_option("--max-iters", ref.max_iters, "Lloyd iteration cap");
  fit->add_option("--rel-tol", ref.rel_tol, "Relative inertia change for convergence");
  add_workers(fit);

  SuiteConfig suite_cfg;
  std::size_t bpe_merges = 0;
  TokenizerArgs targs;
  std::string manifest, out_path, variants = "clean", suite_name = "all", dump_audio;

  auto* tok = app.add_subcommand("tokenize", "Write token sequences in the pre-tokenized file format");
  tok->add_option("--manifest", manifest, "Corpus manifest")->required();
  tok->add_option("--out", out_path, "Pre-tokenized file to write")->required();
  tok->add_option("--variants", variants, "Comma list of clean, crop, pitch, noise, speed or all");
  targs.Register(tok);
  RegisterSuiteConfig(tok, suite_cfg, bpe_merges);
  add_workers(tok);

  auto* run = app.add_subcommand("run", "Run benchmark suites and write report.json and report.md");
  run->add_option("--manifest", manifest, "Corpus manifest")->required();
  run->add_option("--out", out_path, "Output directory")->required();
  run->add_option("--suite", suite_name, "invariance, robustness, compressibility, vocabulary or all");
  run->add_option("--dump-audio", dump_audio, "Also write every perturbed utterance under this directory");
  targs.Register(run);
  RegisterSuiteConfig(run, suite_cfg, bpe_merges);
  add_workers(run);

  std::vector<std::string> reports, flagged_reports;
  std::string downstream;
  bool force = false;
  auto* cor = app.add_subcommand("correlate", "Correlate metric changes with downstream task changes");
  cor->add_option("reports", reports, "report.json files");
  cor->add_option("--report", flagged_reports, "report.json file (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cor->add_option("--downstream", downstream, "Downstream results, one JSON object per line")->required();
  cor->add_option("--out", out_path, "Output directory")->required();
  cor->add_flag("--force", force, "Correlate reports with differing corpus or config digests");

  std::string layout, root, split = "test";
  std::vector<std::string> languages;
  auto* imp = app.add_subcommand("import-manifest", "Build a manifest from a FLEURS or TIMIT directory tree");
  imp->add_option("--layout", layout, "fleurs or timit")->required();
  imp->add_option("--root", root, "Dataset root directory")->required();
  imp->add_option("--languages", languages, "FLEURS language directories")->delimiter(',');
  imp->add_option("--split", split, "FLEURS split");
  imp->add_option("--out", out_path, "Manifest to write")->required();

  try {
    const std::vector<std::string> args = ExpandConfigFile(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (bpe_merges > 0) suite_cfg.bpe_merges = bpe_merges;
    if (gen->parsed()) return CmdGenCorpus(synth, gen_out, workers, out);
    if (fit->parsed()) return CmdFit(fit_manifest, ref, fit_out, workers, out);
    if (tok->parsed()) return CmdTokenize(manifest, targs, suite_cfg, variants, out_path, workers, out);
    if (run->parsed()) return CmdRun(manifest, targs, suite_cfg, suite_name, out_path, workers, dump_audio, out);
    if (cor->parsed()) {
      reports.insert(reports.end(), flagged_reports.begin(), flagged_reports.end());
      return CmdCorrelate(reports, downstream, out_path, force, out, err);
    }
    if (imp->parsed()) return CmdImport(layout, root, languages, split, out_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace stab
