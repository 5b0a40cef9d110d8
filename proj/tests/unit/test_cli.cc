// tests/unit/test_cli.cc

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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "doctest.h"
#include "stab/analysis.h"
#include "stab/manifest.h"
#include "stab/report.h"
#include "stab/wav.h"
#include "test_util.h"

namespace fs = std::filesystem;
using stab::testing::TempDir;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = stab::RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::size_t CountLines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// A small corpus and a fitted model shared by the tests in this file.
struct Workspace {
  TempDir dir{"cli"};
  fs::path manifest = dir / "corpus/manifest.jsonl";
  fs::path model = dir / "model.json";

  Workspace() {
    const auto g = Cli({"gen-corpus", "--languages", "2", "--speakers", "2", "--texts", "3", "--duration",
                        "4.5", "--out", (dir / "corpus").string(), "--seed", "5"});
    REQUIRE_MESSAGE(g.code == 0, g.err);
    const auto f = Cli({"fit-tokenizer", "--manifest", manifest.string(), "--out", model.string(), "--k", "16"});
    REQUIRE_MESSAGE(f.code == 0, f.err);
  }
};

Workspace& Shared() {
  static Workspace w;
  return w;
}

std::vector<std::string> Common() {
  return {"--manifest", Shared().manifest.string(), "--min-language-tokens", "100", "--no-cache"};
}

std::vector<std::string> Concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("gen-corpus writes the requested grid deterministically") {
  TempDir dir("gen");
  const std::vector<std::string> base{"gen-corpus", "--languages", "4", "--speakers", "3", "--texts", "50",
                                      "--duration", "4.5", "--rate", "8000", "--workers", "2"};
  const auto a = Cli(Concat(base, {"--out", (dir / "a").string()}));
  REQUIRE_MESSAGE(a.code == 0, a.err);
  CHECK(a.out.find("utterances: 600\n") != std::string::npos);
  const auto b = Cli(Concat(base, {"--out", (dir / "b").string()}));
  REQUIRE(b.code == 0);
  const auto digest = [](const std::string& s) { return s.substr(s.find("digest: ")); };
  CHECK(digest(a.out) == digest(b.out));
  const auto m = stab::LoadManifest(dir / "a/manifest.jsonl");
  CHECK(m.utterances.size() == 600);
  CHECK(stab::ProbeWav(m.utterances.front().audio_path).sample_rate_hz == 8000);
}

TEST_CASE("errors exit with status 2 and name the offending path") {
  TempDir dir("err");
  WriteText(dir / "blocker", "x");
  const std::string bad = (dir / "blocker/sub").string();
  const auto r = Cli({"gen-corpus", "--languages", "1", "--speakers", "1", "--texts", "1", "--out", bad});
  CHECK(r.code == stab::kExitError);
  CHECK(r.err.find(bad) != std::string::npos);

  CHECK(Cli({"no-such-command"}).code == stab::kExitError);
  CHECK(Cli({"run", "--out", (dir / "x").string()}).code == stab::kExitError);
  const auto missing = Cli({"run", "--manifest", (dir / "absent.jsonl").string(), "--model", "m", "--out",
                            (dir / "x").string()});
  CHECK(missing.code == stab::kExitError);
  CHECK(missing.err.find("absent.jsonl") != std::string::npos);
  CHECK(Cli({"--help"}).code == stab::kExitOk);
}

TEST_CASE("config files expand into flags that explicit flags override") {
  TempDir dir("cfg");
  WriteText(dir / "c.ini", "# comment\nsnr_db = 20\n; other comment\npivot = \"de\"\n\n");
  const auto args = stab::ExpandConfigFile({"run", "--out", "o", "--config", (dir / "c.ini").string(), "--snr-db", "5"});
  CHECK(args == std::vector<std::string>{"run", "--snr-db=20", "--pivot=de", "--out", "o", "--snr-db", "5"});
  CHECK(stab::ExpandConfigFile({"run", "--config=" + (dir / "c.ini").string()}).size() == 3);
  CHECK_THROWS_AS(stab::ExpandConfigFile({"run", "--config", (dir / "none.ini").string()}), stab::Error);

  auto& w = Shared();
  const auto run = [&](std::vector<std::string> extra) {
    const auto r = Cli(Concat(Concat({"run", "--model", w.model.string(), "--suite", "robustness", "--config",
                                      (dir / "c.ini").string(), "--out", (dir / "out").string()},
                                     Common()),
                              extra));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    return stab::LoadReport(dir / "out/report.json").Find("gaussian_noise")->label;
  };
  CHECK(run({}) == "Gaussian Noise (20 dB)");
  CHECK(run({"--snr-db", "5"}) == "Gaussian Noise (5 dB)");
}

TEST_CASE("the cache directory comes from STAB_CACHE_DIR unless given explicitly") {
  TempDir dir("cache");
  auto& w = Shared();
  const std::vector<std::string> base{"run", "--model", w.model.string(), "--suite", "invariance",
                                      "--manifest", w.manifest.string(), "--out", (dir / "out").string()};
  ::setenv("STAB_CACHE_DIR", (dir / "env").c_str(), 1);
  const auto first = Cli(base);
  REQUIRE_MESSAGE(first.code == 0, first.err);
  CHECK(fs::exists(dir / "env"));
  CHECK(first.out.find(" 0 hits") != std::string::npos);
  const auto second = Cli(base);
  CHECK(second.out.find(" 0 misses") != std::string::npos);
  CHECK(Slurp(dir / "out/report.json").size() > 0);
  const auto expl = Cli(Concat(base, {"--cache", (dir / "flag").string()}));
  REQUIRE(expl.code == 0);
  CHECK(fs::exists(dir / "flag"));
  ::unsetenv("STAB_CACHE_DIR");
}

TEST_CASE("run writes every dimension, tokenize round-trips through the file adapter") {
  TempDir dir("run");
  auto& w = Shared();
  const auto r = Cli(Concat({"run", "--model", w.model.string(), "--out", (dir / "ref").string()}, Common()));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("time total: ") != std::string::npos);
  CHECK(fs::exists(dir / "ref/report.md"));
  const auto ref = stab::LoadReport(dir / "ref/report.json");
  CHECK(ref.dimensions.size() == 12);
  for (const auto& d : ref.dimensions) CHECK_MESSAGE(d.value.has_value(), d.name << ": " << d.reason);

  const auto t = Cli(Concat({"tokenize", "--model", w.model.string(), "--variants", "all", "--out",
                             (dir / "tok/tokens.jsonl").string()},
                            Common()));
  REQUIRE_MESSAGE(t.code == 0, t.err);
  CHECK(t.out.find("sequences: 60 (0 skipped)") != std::string::npos);
  const auto f = Cli(Concat({"run", "--tokens", (dir / "tok/tokens.jsonl").string(), "--vocab-size",
                             std::to_string(ref.tokenizer.vocab_size), "--frame-rate",
                             stab::testing::Fmt(ref.tokenizer.frame_rate_hz), "--out", (dir / "files").string()},
                            Common()));
  REQUIRE_MESSAGE(f.code == 0, f.err);
  const auto files = stab::LoadReport(dir / "files/report.json");
  CHECK(files.tokenizer.tokenizer_id == "tokens");
  REQUIRE(files.dimensions.size() == ref.dimensions.size());
  for (std::size_t i = 0; i < ref.dimensions.size(); ++i) {
    CHECK(files.dimensions[i].value == ref.dimensions[i].value);
    CHECK(files.dimensions[i].micro == ref.dimensions[i].micro);
    CHECK(files.dimensions[i].n_items == ref.dimensions[i].n_items);
    CHECK(files.dimensions[i].skipped == ref.dimensions[i].skipped);
  }
  CHECK(files.language_distributions == ref.language_distributions);

  const auto partial = Cli(Concat({"tokenize", "--model", w.model.string(), "--variants", "clean", "--out",
                                   (dir / "clean.jsonl").string()},
                                  Common()));
  REQUIRE(partial.code == 0);
  const auto miss = Cli(Concat({"run", "--tokens", (dir / "clean.jsonl").string(), "--vocab-size", "16",
                                "--frame-rate", "50", "--suite", "robustness", "--out", (dir / "miss").string()},
                               Common()));
  CHECK(miss.code == stab::kExitError);
  CHECK(miss.err.find("no tokens") != std::string::npos);
  CHECK(Cli(Concat({"run", "--out", (dir / "none").string()}, Common())).code == stab::kExitError);
}

TEST_CASE("run drives an external adapter over the line protocol") {
  TempDir dir("adapter");
  const std::string cmd = std::string(STAB_FAKE_ADAPTER) + " --id fake-adapter --vocab 40 --rate 50";
  const auto r = Cli(Concat({"run", "--adapter-cmd", cmd, "--suite", "all", "--workers", "2", "--out",
                             (dir / "out").string()},
                            Common()));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rep = stab::LoadReport(dir / "out/report.json");
  CHECK(rep.tokenizer.tokenizer_id == "fake-adapter");
  CHECK(rep.tokenizer.vocab_size == 40);
  CHECK(rep.dimensions.size() == 12);

  const auto bad = Cli(Concat({"run", "--adapter-cmd", std::string(STAB_FAKE_ADAPTER) + " --out-of-range",
                               "--suite", "invariance", "--out", (dir / "bad").string()},
                              Common()));
  CHECK(bad.code == stab::kExitError);
  CHECK_FALSE(fs::exists(dir / "bad/report.json"));
}

TEST_CASE("correlate emits every dimension by task cell") {
  TempDir dir("corr");
  auto& w = Shared();
  std::vector<std::string> reports;
  std::string downstream;
  for (int k : {8, 12, 24}) {
    const fs::path model = dir / ("k" + std::to_string(k) + ".json");
    REQUIRE(Cli({"fit-tokenizer", "--manifest", w.manifest.string(), "--out", model.string(), "--k",
                 std::to_string(k)})
                .code == 0);
    const fs::path out = dir / ("run" + std::to_string(k));
    const auto r = Cli(Concat({"run", "--model", model.string(), "--out", out.string()}, Common()));
    REQUIRE_MESSAGE(r.code == 0, r.err);
    reports.push_back((out / "report.json").string());
    const auto id = stab::LoadReport(out / "report.json").tokenizer.tokenizer_id;
    downstream += R"({"tokenizer_id":")" + id + R"(","scores":{"ASR_WER":)" + std::to_string(30 - k) +
                  R"(,"AST_BLEU":)" + std::to_string(k) + R"(},"directions":{"ASR_WER":"lower","AST_BLEU":"higher"}})" + "\n";
  }
  WriteText(dir / "downstream.jsonl", downstream);

  const auto c = Cli({"correlate", reports[0], "--report", reports[1], "--report", reports[2], "--downstream",
                      (dir / "downstream.jsonl").string(), "--out", (dir / "corr").string()});
  REQUIRE_MESSAGE(c.code == 0, c.err);
  CHECK(c.out.find("tokenizers: 3 ") != std::string::npos);
  const std::string csv = Slurp(dir / "corr/correlation.csv");
  CHECK(csv.rfind("dimension,task,correlation,n_pairs,estimator,note\n", 0) == 0);
  CHECK(CountLines(csv) == 1 + 12 * 2);
  CHECK(CountLines(Slurp(dir / "corr/correlation_matrix.csv")) == 13);
  CHECK(Slurp(dir / "corr/table.md").find("| Speaker Invariance |") != std::string::npos);
  const auto id0 = stab::LoadReport(reports[0]).tokenizer.tokenizer_id;
  CHECK(fs::exists(dir / "corr" / ("similarity_" + id0 + ".csv")));
  CHECK(fs::exists(dir / "corr" / ("js_divergence_" + id0 + ".csv")));

  WriteText(dir / "short.jsonl", downstream.substr(0, downstream.find('\n') + 1));
  const auto missing = Cli({"correlate", reports[0], reports[1], "--downstream", (dir / "short.jsonl").string(),
                            "--out", (dir / "c2").string()});
  CHECK(missing.code == stab::kExitError);
  CHECK(missing.err.find(stab::LoadReport(reports[1]).tokenizer.tokenizer_id) != std::string::npos);

  auto altered = stab::LoadReport(reports[2]);
  altered.corpus_digest = "0000000000000000";
  WriteText(dir / "altered.json", stab::ReportToJson(altered));
  const std::vector<std::string> mixed{"correlate", reports[0], (dir / "altered.json").string(), "--downstream",
                                       (dir / "downstream.jsonl").string(), "--out", (dir / "c3").string()};
  const auto refused = Cli(mixed);
  CHECK(refused.code == stab::kExitError);
  CHECK(refused.err.find("--force") != std::string::npos);
  const auto forced = Cli(Concat(mixed, {"--force"}));
  CHECK(forced.code == 0);
  CHECK(forced.err.find("warning: corpus_digest differs") != std::string::npos);
}

TEST_CASE("import-manifest builds a manifest from a FLEURS tree") {
  TempDir dir("import");
  const auto tone = stab::testing::Tone(200.0, 1.0, 16000);
  for (const char* lang : {"en_us", "fr_fr"}) {
    const fs::path audio = dir / "fleurs" / lang / "audio" / "test";
    fs::create_directories(audio);
    stab::WriteWav(audio / "1.wav", tone, 16000);
    stab::WriteWav(audio / "2.wav", tone, 16000);
    WriteText(dir / "fleurs" / lang / "test.tsv", "10\t1.wav\tt\n11\t2.wav\tu\n");
  }
  const auto r = Cli({"import-manifest", "--layout", "fleurs", "--root", (dir / "fleurs").string(),
                      "--languages", "en_us,fr_fr", "--out", (dir / "m/manifest.jsonl").string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("utterances: 4\n") != std::string::npos);
  CHECK(stab::LoadManifest(dir / "m/manifest.jsonl").utterances.size() == 4);
  CHECK(Cli({"import-manifest", "--layout", "other", "--root", (dir / "fleurs").string(), "--out",
             (dir / "x.jsonl").string()})
            .code == stab::kExitError);
}
