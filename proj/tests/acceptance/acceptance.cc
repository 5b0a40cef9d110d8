// tests/acceptance/acceptance.cc

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

// Runs each headline acceptance check and prints one PASS/FAIL line per check.
// Exit status is 0 only when every check passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.h"
#include "oracles.h"
#include "stab/analysis.h"
#include "stab/chrf.h"
#include "stab/compress.h"
#include "stab/dsp.h"
#include "stab/report.h"
#include "stab/vocab.h"
#include "test_util.h"

namespace fs = std::filesystem;
using stab::TokenId;
using Seq = std::vector<TokenId>;

namespace {

// Collects failures for one check; `detail` ends up on the result line.
struct Check {
  bool ok = true;
  std::ostringstream detail;
  std::ostringstream failures;

  void Expect(bool cond, const std::string& what) {
    if (!cond && ok) failures << what;
    ok = ok && cond;
  }
};

int g_failed = 0;

void Report(const std::string& name, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.failures << "exception: " << e.what();
  }
  std::cout << (c.ok ? "PASS " : "FAIL ") << name << ": " << (c.ok ? c.detail.str() : c.failures.str())
            << std::endl;
  g_failed += !c.ok;
}

std::string Fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << v;
  return s.str();
}

void Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  if (stab::RunCli(args, out, err) != stab::kExitOk) {
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    throw stab::Error("command failed: " + joined + "\n" + err.str());
  }
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Seq RandomSeq(std::mt19937& gen, int min_len, int max_len, int alphabet) {
  std::uniform_int_distribution<int> len(min_len, max_len), id(0, alphabet - 1);
  Seq s(len(gen));
  for (auto& t : s) t = static_cast<TokenId>(id(gen));
  return s;
}

double MeasuredSnrDb(std::span<const float> clean, std::span<const float> noisy) {
  double ps = 0.0, pn = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    ps += static_cast<double>(clean[i]) * clean[i];
    const double d = static_cast<double>(noisy[i]) - clean[i];
    pn += d * d;
  }
  return 10.0 * std::log10(ps / pn);
}

void ChrfOracle(Check& c) {
  std::mt19937 gen(2026);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Seq hyp = RandomSeq(gen, 0, 12, 5), ref = RandomSeq(gen, 0, 12, 5);
    worst = std::max(worst, std::abs(stab::Chrf(hyp, ref) - stab::oracle::Chrf(hyp, ref, 6, 2.0)));
  }
  c.Expect(worst < 1e-9, "max |delta| vs brute force = " + std::to_string(worst));
  int identity = 0;
  for (int i = 0; i < 100; ++i) {
    const Seq x = RandomSeq(gen, 1, 12, 5);
    identity += stab::Chrf(x, x) == 100.0;
  }
  c.Expect(identity == 100, "chrf(x,x) == 100 for only " + std::to_string(identity) + "/100");
  c.detail << "200 pairs, max |delta| " << worst << "; chrf(x,x)=100 for " << identity << "/100";
}

void HuffmanOptimality(Check& c) {
  long tables = 0, mismatches = 0, kraft_violations = 0;
  for (int k = 1; k <= 5; ++k) {
    std::vector<std::uint64_t> counts(k, 1);
    for (;;) {
      stab::FrequencyTable t(8);
      for (int j = 0; j < k; ++j) t.Add(static_cast<TokenId>(j), counts[j]);
      std::uint64_t bits = 0;
      double kraft = 0.0;
      for (const auto& [id, len] : stab::HuffmanCodeLengths(t)) {
        bits += t.counts.at(id) * static_cast<std::uint64_t>(len);
        kraft += std::ldexp(1.0, -len);
      }
      mismatches += bits != stab::oracle::OptimalPrefixCodeBits(counts);
      kraft_violations += kraft > 1.0;
      ++tables;
      int j = 0;
      while (j < k && counts[j] == 6) counts[j++] = 1;
      if (j == k) break;
      ++counts[j];
    }
  }
  c.Expect(mismatches == 0, std::to_string(mismatches) + " tables not optimal");
  c.Expect(kraft_violations == 0, std::to_string(kraft_violations) + " Kraft violations");
  c.detail << tables << " tables optimal, Kraft holds for all";
}

void HuffmanEfficiency(Check& c) {
  std::mt19937 gen(11);
  std::uniform_int_distribution<TokenId> id(0, 255);
  Seq s(100000);
  for (auto& t : s) t = id(gen);
  const double uniform = stab::HuffmanEfficiency(std::vector<Seq>{s}, 256);
  const double constant = stab::HuffmanEfficiency(std::vector<Seq>{Seq(5000, 3)}, 32768);
  c.Expect(uniform >= -1.0 && uniform <= 1.0, "uniform stream efficiency " + Fmt(uniform));
  c.Expect(std::abs(constant - 93.33) <= 0.01, "constant stream efficiency " + Fmt(constant));
  c.detail << "uniform |V|=256: " << Fmt(uniform) << "%; constant |V|=32768: " << Fmt(constant) << "%";
}

void Bpe(Check& c) {
  std::mt19937 gen(3);
  int round_trips = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Seq> corpus;
    for (int i = 0; i < 1 + trial % 4; ++i) corpus.push_back(RandomSeq(gen, 0, 50, 2 + trial % 5));
    const auto learned = stab::LearnBpe(corpus, 1 + trial % 10);
    bool ok = true;
    for (const auto& s : corpus) ok = ok && stab::BpeDecode(stab::BpeEncode(s, learned.merges), learned.merges) == s;
    round_trips += ok;
  }
  const double fixture = stab::BpeEfficiency(std::vector<Seq>{{1, 2, 1, 2, 1, 2}}, 1);
  const auto tie = stab::LearnBpe(std::vector<Seq>{{1, 2, 1, 2, 1, 2, 1}}, 1);
  c.Expect(round_trips == 100, "decode(encode(x)) failed on " + std::to_string(100 - round_trips) + " corpora");
  c.Expect(fixture == 50.0, "[[1,2]x3] with one merge gave " + Fmt(fixture));
  c.Expect(tie.merges.size() == 1 && tie.merges[0].left == 1 && tie.merges[0].right == 2,
           "tie fixture did not pick (1,2)");
  c.detail << "100/100 round trips; [[1,2]x3] -> " << fixture << "%; tie picks (1,2)";
}

void Dedup(Check& c) {
  const double fixture = stab::DedupEfficiency(std::vector<Seq>{{5, 5, 5, 7, 7}});
  c.Expect(fixture == 60.0, "[[5,5,5,7,7]] gave " + Fmt(fixture));
  int exact = 0;
  for (int n = 1; n <= 200; ++n) {
    exact += stab::DedupEfficiency(std::vector<Seq>{Seq(n, 9)}) == 100.0 * (1.0 - 1.0 / n);
  }
  c.Expect(exact == 200, "constant sequences exact for " + std::to_string(exact) + "/200 lengths");
  c.detail << "[[5,5,5,7,7]] -> " << fixture << "; constant length n exact for n = 1..200";
}

void Entropy(Check& c) {
  stab::FrequencyTable uniform(64), degenerate(64), half(4);
  for (TokenId i = 0; i < 64; ++i) uniform.Add(i, 10);
  degenerate.Add(7, 1000);
  half.Add(0, 50);
  half.Add(3, 50);
  const double u = stab::EntropyScore(uniform), d = stab::EntropyScore(degenerate), h = stab::EntropyScore(half);
  c.Expect(std::abs(u - 100.0) <= 0.1, "uniform gave " + Fmt(u));
  c.Expect(d == 0.0, "degenerate gave " + Fmt(d));
  c.Expect(std::abs(h - 50.0) <= 1e-9, "half/half over 4 gave " + Fmt(h, 12));
  c.detail << "uniform " << Fmt(u) << ", degenerate " << d << ", half/half " << Fmt(h, 10);
}

void Dsp(Check& c) {
  using stab::testing::PeakFrequency;
  using stab::testing::Tone;
  const auto tone10 = Tone(440.0, 10.0, 16000, 0.5);
  const double snr = MeasuredSnrDb(tone10, stab::AddGaussianNoise(tone10, 10.0, 42));
  c.Expect(std::abs(snr - 10.0) <= 0.1, "noise SNR " + Fmt(snr) + " dB");

  const auto x = Tone(440.0, 4.0, 16000);
  const auto fast = stab::ChangeSpeed(x, 0.8);
  const double ratio = static_cast<double>(fast.size()) / x.size();
  const double f_speed = PeakFrequency(fast, 16000);
  c.Expect(std::abs(ratio - 1.25) <= 1.25 * 0.005, "speed duration ratio " + Fmt(ratio));
  c.Expect(std::abs(f_speed - 352.0) <= 352.0 * 0.02, "speed peak " + Fmt(f_speed) + " Hz");

  const auto up = stab::ShiftPitch(x, 2.0, 16000);
  const double target = 440.0 * std::pow(2.0, 2.0 / 12.0);
  const double f_pitch = PeakFrequency(up, 16000);
  const double keep = static_cast<double>(up.size()) / x.size();
  c.Expect(std::abs(f_pitch - target) <= target * 0.02, "pitch peak " + Fmt(f_pitch) + " Hz");
  c.Expect(std::abs(keep - 1.0) <= 0.01, "pitch duration ratio " + Fmt(keep));
  c.detail << "SNR " << Fmt(snr, 3) << " dB; speed x0.8 ratio " << Fmt(ratio) << ", " << Fmt(f_speed, 1)
           << " Hz; pitch +2 st " << Fmt(f_pitch, 1) << " Hz, ratio " << Fmt(keep);
}

void Determinism(Check& c, const fs::path& work) {
  const fs::path corpus = work / "det";
  Cli({"gen-corpus", "--languages", "4", "--speakers", "3", "--texts", "50", "--out", corpus.string()});
  const std::string manifest = (corpus / "manifest.jsonl").string(), model = (work / "det-model.json").string();
  Cli({"fit-tokenizer", "--manifest", manifest, "--out", model});
  std::vector<std::string> bytes;
  for (const auto& [tag, workers] : std::vector<std::pair<std::string, std::string>>{
           {"a", "1"}, {"b", "1"}, {"c", "8"}}) {
    const fs::path out = work / ("det-run-" + tag);
    Cli({"run", "--manifest", manifest, "--model", model, "--suite", "all", "--workers", workers, "--no-cache",
         "--out", out.string()});
    bytes.push_back(Slurp(out / "report.json"));
  }
  const auto report = stab::ReportFromJson(bytes[0]);
  c.Expect(report.dimensions.size() == 12, "report has " + std::to_string(report.dimensions.size()) + " dimensions");
  c.Expect(bytes[0] == bytes[1], "two runs with 1 worker differ");
  c.Expect(bytes[0] == bytes[2], "1 worker and 8 workers differ");
  c.detail << "600 utterances; report.json identical across 2 runs and 1 vs 8 workers (" << bytes[0].size()
           << " bytes)";
}

void Monotonicity(Check& c, const fs::path& work) {
  const fs::path corpus = work / "mono";
  Cli({"gen-corpus", "--languages", "2", "--speakers", "3", "--texts", "20", "--seed", "7", "--out",
       corpus.string()});
  const std::string manifest = (corpus / "manifest.jsonl").string(), model = (work / "mono-model.json").string();
  Cli({"fit-tokenizer", "--manifest", manifest, "--out", model});
  std::vector<double> values;
  for (const char* snr : {"20", "10", "0"}) {
    const fs::path out = work / (std::string("mono-") + snr);
    Cli({"run", "--manifest", manifest, "--model", model, "--suite", "robustness", "--snr-db", snr, "--no-cache",
         "--out", out.string()});
    const auto* dim = stab::LoadReport(out / "report.json").Find("gaussian_noise");
    if (!dim || !dim->value) throw stab::Error("no gaussian_noise value at " + std::string(snr) + " dB");
    values.push_back(*dim->value);
  }
  c.Expect(values[0] > values[1] && values[1] > values[2],
           "chrF not strictly decreasing: " + Fmt(values[0], 2) + ", " + Fmt(values[1], 2) + ", " + Fmt(values[2], 2));
  c.detail << "120 utterances; noise chrF at 20/10/0 dB = " << Fmt(values[0], 2) << " > " << Fmt(values[1], 2)
           << " > " << Fmt(values[2], 2);
}

stab::MetricReport FixtureReport(const std::string& id, double value) {
  stab::MetricReport r;
  r.tokenizer.tokenizer_id = id;
  r.tokenizer.vocab_size = 4;
  stab::DimensionEntry e;
  e.name = "speaker_invariance";
  e.label = "Speaker Invariance";
  e.value = value;
  r.dimensions.push_back(e);
  return r;
}

stab::DownstreamResults FixtureTask(const std::string& id, double score, stab::TaskDirection dir) {
  return {id, {{"T", score}}, {{"T", dir}}};
}

void Correlation(Check& c) {
  using D = stab::TaskDirection;
  const auto cell = [](std::vector<double> metric, std::vector<double> task, D dir) {
    std::vector<stab::MetricReport> r;
    std::vector<stab::DownstreamResults> d;
    for (std::size_t i = 0; i < metric.size(); ++i) {
      const std::string id = "t" + std::to_string(i);
      r.push_back(FixtureReport(id, metric[i]));
      d.push_back(FixtureTask(id, task[i], dir));
    }
    return stab::ComputeCorrelation(r, d).at("speaker_invariance", "T").value.value_or(NAN);
  };
  const double pos = cell({10, 20, 30}, {1, 2, 3}, D::kHigherIsBetter);
  const double neg = cell({10, 20, 30}, {10, 12, 15}, D::kLowerIsBetter);
  const double third = cell({3, 1, 2}, {2, 1, 3}, D::kHigherIsBetter);
  const double flipped = cell({3, 1, 2}, {2, 1, 3}, D::kLowerIsBetter);
  c.Expect(pos == 1.0, "agreeing fixture gave " + Fmt(pos));
  c.Expect(neg == -1.0, "WER fixture gave " + Fmt(neg));
  c.Expect(std::abs(third - 1.0 / 3.0) < 1e-12, "mixed fixture gave " + Fmt(third));
  c.Expect(flipped == -third, "flipping the direction gave " + Fmt(flipped));
  c.detail << "cells " << Fmt(pos, 3) << ", " << Fmt(neg, 3) << ", " << Fmt(third, 3) << "; flipped column "
           << Fmt(flipped, 3);
}

void Runtime(Check& c, const fs::path& work) {
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  const std::string workers = std::to_string(std::min(8u, cores));
  const fs::path corpus = work / "runtime";
  const auto t0 = std::chrono::steady_clock::now();
  Cli({"gen-corpus", "--languages", "4", "--speakers", "5", "--texts", "50", "--duration", "4.5", "--workers",
       workers, "--out", corpus.string()});
  const std::string manifest = (corpus / "manifest.jsonl").string(), model = (work / "runtime-model.json").string();
  Cli({"fit-tokenizer", "--manifest", manifest, "--out", model, "--workers", workers});
  const auto t1 = std::chrono::steady_clock::now();
  Cli({"run", "--manifest", manifest, "--model", model, "--suite", "all", "--workers", workers, "--no-cache",
       "--out", (work / "runtime-run").string()});
  const auto t2 = std::chrono::steady_clock::now();
  const double prep = std::chrono::duration<double>(t1 - t0).count();
  const double suite = std::chrono::duration<double>(t2 - t1).count();
  const auto report = stab::LoadReport(work / "runtime-run/report.json");
  std::size_t with_value = 0;
  for (const auto& d : report.dimensions) with_value += d.value.has_value();
  c.Expect(with_value == 12, std::to_string(with_value) + "/12 dimensions have a value");
  c.Expect(prep + suite < 15 * 60.0, "took " + Fmt(prep + suite, 1) + " s");
  c.detail << "1000 utterances x 4.5 s, " << workers << " worker(s) on " << cores << " core(s): suite "
           << Fmt(suite, 1) << " s, corpus + fit " << Fmt(prep, 1) << " s";
}

}  // namespace

int main() {
  const stab::testing::TempDir work("acceptance");
  Report("chrF oracle", ChrfOracle);
  Report("Huffman optimality", HuffmanOptimality);
  Report("Huffman efficiency", HuffmanEfficiency);
  Report("BPE", Bpe);
  Report("Dedup", Dedup);
  Report("Entropy score", Entropy);
  Report("DSP", Dsp);
  Report("Determinism", [&](Check& c) { Determinism(c, work.path()); });
  Report("Monotonicity", [&](Check& c) { Monotonicity(c, work.path()); });
  Report("Correlation", Correlation);
  Report("Runtime", [&](Check& c) { Runtime(c, work.path()); });
  std::cout << (g_failed == 0 ? "all acceptance checks passed" : std::to_string(g_failed) + " acceptance check(s) failed")
            << std::endl;
  return g_failed == 0 ? 0 : 1;
}
