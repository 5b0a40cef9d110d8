// tests/unit/test_corpus.cc

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

#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "stab/manifest.h"
#include "stab/synth.h"
#include "stab/wav.h"
#include "test_util.h"

namespace fs = std::filesystem;
using stab::testing::TempDir;

namespace {

// Hand-built RIFF header so the reader is checked against an independent writer.
void WriteRawWav(const fs::path& path, int rate, int channels, int bits,
                 const std::vector<std::int16_t>& samples, std::size_t truncate_by = 0) {
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string b;
  auto u32 = [&](std::uint32_t v) { b.append(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { b.append(reinterpret_cast<const char*>(&v), 2); };
  b += "RIFF";
  u32(36 + data_bytes);
  b += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  b += "data";
  u32(data_bytes);
  b.append(reinterpret_cast<const char*>(samples.data()), data_bytes);
  b.erase(b.size() - truncate_by);
  std::ofstream(path, std::ios::binary) << b;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void WriteLines(const fs::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << "\n";
}

std::string Record(const std::string& id, const std::string& wav, const std::string& lang = "en",
                   const std::string& spk = "s1", const std::string& text = "t1", double dur = 1.0) {
  return R"({"utterance_id":")" + id + R"(","audio_path":")" + wav + R"(","language":")" + lang +
         R"(","speaker_id":")" + spk + R"(","text_id":")" + text + R"(","duration_s":)" +
         std::to_string(dur) + "}";
}

}  // namespace

TEST_CASE("wav reader scales 16-bit PCM and reports duration") {
  TempDir dir("wav");
  std::vector<std::int16_t> s(16000, 0);
  s[0] = -32768;
  s[1] = 32767;
  WriteRawWav(dir / "a.wav", 16000, 1, 16, s);
  const auto x = stab::ReadWav(dir / "a.wav", 16000);
  CHECK(x.size() == 16000);
  CHECK(x[0] == -1.0f);
  CHECK(x[1] == doctest::Approx(0.99997).epsilon(1e-5));
  const auto info = stab::ProbeWav(dir / "a.wav");
  CHECK(info.num_frames == 16000);
  CHECK(static_cast<double>(info.num_frames) / info.sample_rate_hz == 1.0);
}

TEST_CASE("wav reader rejects unsupported and damaged files") {
  TempDir dir("wavbad");
  WriteRawWav(dir / "stereo.wav", 16000, 2, 16, std::vector<std::int16_t>(200, 1));
  CHECK_THROWS_WITH_AS(stab::ReadWav(dir / "stereo.wav", 16000), doctest::Contains("mono required"),
                       stab::Error);
  WriteRawWav(dir / "rate.wav", 8000, 1, 16, std::vector<std::int16_t>(100, 1));
  CHECK_THROWS_AS(stab::ReadWav(dir / "rate.wav", 16000), stab::Error);
  WriteRawWav(dir / "trunc.wav", 16000, 1, 16, std::vector<std::int16_t>(100, 1), 50);
  CHECK_THROWS_AS(stab::ReadWav(dir / "trunc.wav", 16000), stab::Error);
  WriteRawWav(dir / "empty.wav", 16000, 1, 16, {});
  CHECK_THROWS_AS(stab::ReadWav(dir / "empty.wav", 16000), stab::Error);
}

TEST_CASE("wav write/read round trip is exact on the int16 grid") {
  TempDir dir("wavrt");
  std::vector<float> x = {0.0f, 0.5f, -0.5f, -1.0f, 32767.0f / 32768.0f, 1.5f};
  stab::WriteWav(dir / "x.wav", x, 16000);
  const auto y = stab::ReadWav(dir / "x.wav", 16000);
  REQUIRE(y.size() == x.size());
  for (std::size_t i = 0; i + 1 < x.size(); ++i) CHECK(y[i] == x[i]);
  CHECK(y.back() == 32767.0f / 32768.0f);  // clamped
}

TEST_CASE("manifest loads records in file order and resolves paths") {
  TempDir dir("man");
  for (const char* n : {"a", "b", "c"}) {
    WriteRawWav(dir / (std::string(n) + ".wav"), 16000, 1, 16, std::vector<std::int16_t>(16000, 0));
  }
  WriteLines(dir / "m.jsonl", {Record("u3", "c.wav"), Record("u1", "a.wav", "de", "s2"),
                               Record("u2", (dir / "b.wav").string())});
  const auto m = stab::LoadManifest(dir / "m.jsonl");
  REQUIRE(m.utterances.size() == 3);
  CHECK(m.utterances[0].utterance_id == "u3");
  CHECK(m.utterances[1].utterance_id == "u1");
  CHECK(m.utterances[1].language == "de");
  CHECK(m.utterances[2].utterance_id == "u2");
  CHECK(m.utterances[0].audio_path.is_absolute());
  CHECK(fs::equivalent(m.utterances[0].audio_path, dir / "c.wav"));
}

TEST_CASE("manifest errors") {
  TempDir dir("manerr");
  WriteRawWav(dir / "a.wav", 16000, 1, 16, std::vector<std::int16_t>(16000, 0));
  SUBCASE("duplicate id names the id") {
    WriteLines(dir / "m.jsonl", {Record("u1", "a.wav"), Record("u1", "a.wav")});
    CHECK_THROWS_WITH_AS(stab::LoadManifest(dir / "m.jsonl"), doctest::Contains("\"u1\""), stab::Error);
  }
  SUBCASE("empty file") {
    WriteLines(dir / "m.jsonl", {});
    CHECK_THROWS_WITH_AS(stab::LoadManifest(dir / "m.jsonl"), doctest::Contains("empty manifest"),
                         stab::Error);
  }
  SUBCASE("malformed line names the line") {
    WriteLines(dir / "m.jsonl", {Record("u1", "a.wav"), "{not json"});
    CHECK_THROWS_WITH_AS(stab::LoadManifest(dir / "m.jsonl"), doctest::Contains("m.jsonl:2"), stab::Error);
  }
  SUBCASE("missing audio") {
    WriteLines(dir / "m.jsonl", {Record("u1", "nope.wav")});
    CHECK_THROWS_WITH_AS(stab::LoadManifest(dir / "m.jsonl"), doctest::Contains("missing audio"),
                         stab::Error);
  }
  SUBCASE("duration disagreeing with the audio") {
    WriteLines(dir / "m.jsonl", {Record("u1", "a.wav", "en", "s", "t", 1.5)});
    CHECK_THROWS_AS(stab::LoadManifest(dir / "m.jsonl"), stab::Error);
    stab::ManifestLoadOptions lax;
    lax.verify_audio = false;
    CHECK(stab::LoadManifest(dir / "m.jsonl", lax).utterances.size() == 1);
  }
}

TEST_CASE("manifest write/load round trip is the identity") {
  TempDir dir("manrt");
  stab::SynthesisConfig cfg;
  cfg.n_texts = 2;
  const auto m = stab::SynthesizeCorpus(cfg, dir.path());
  const auto again = stab::LoadManifest(dir / "manifest.jsonl");
  CHECK(again == m);
  stab::WriteManifest(dir / "copy.jsonl", again);
  CHECK(stab::LoadManifest(dir / "copy.jsonl") == m);
  CHECK(stab::ManifestDigest(again) == stab::ManifestDigest(m));
}

TEST_CASE("synthesized corpus has the configured shape") {
  TempDir dir("synth");
  stab::SynthesisConfig cfg;
  cfg.n_languages = 2;
  cfg.n_speakers = 2;
  cfg.n_texts = 5;
  cfg.seed = 7;
  const auto m = stab::SynthesizeCorpus(cfg, dir.path(), 2);
  CHECK(m.utterances.size() == 20);
  std::size_t wavs = 0;
  for (const auto& e : fs::directory_iterator(dir / "wav")) wavs += e.path().extension() == ".wav";
  CHECK(wavs == 20);
  std::map<std::pair<std::string, std::string>, std::set<std::string>> speakers;
  for (const auto& u : m.utterances) {
    speakers[{u.language, u.text_id}].insert(u.speaker_id);
    CHECK(u.duration_s == doctest::Approx(cfg.utterance_duration_s));
  }
  CHECK(speakers.size() == 10);
  for (const auto& [key, s] : speakers) CHECK(s.size() == 2);
}

TEST_CASE("synthesis is byte-deterministic and speakers differ") {
  TempDir a("syA"), b("syB");
  stab::SynthesisConfig cfg;
  cfg.seed = 7;
  const auto ma = stab::SynthesizeCorpus(cfg, a.path(), 1);
  const auto mb = stab::SynthesizeCorpus(cfg, b.path(), 3);
  CHECK(ma.corpus_id == mb.corpus_id);
  for (std::size_t i = 0; i < ma.utterances.size(); ++i) {
    CHECK(Slurp(ma.utterances[i].audio_path) == Slurp(mb.utterances[i].audio_path));
  }
  CHECK(Slurp(a / "manifest.jsonl") == Slurp(b / "manifest.jsonl"));

  const auto s0 = stab::SynthesizeUtterance(cfg, 0, 0, 1);
  const auto s1 = stab::SynthesizeUtterance(cfg, 0, 1, 1);
  CHECK(s0 != s1);
  const auto other_seed = [&] {
    auto c = cfg;
    c.seed = 8;
    return stab::SynthesizeUtterance(c, 0, 0, 1);
  }();
  CHECK(s0 != other_seed);
}

TEST_CASE("synthesis validates its configuration") {
  stab::SynthesisConfig cfg;
  cfg.n_speakers = 0;
  CHECK_THROWS_AS(cfg.Validate(), stab::Error);
  cfg = {};
  cfg.utterance_duration_s = 0.1;
  CHECK_THROWS_AS(cfg.Validate(), stab::Error);
}

TEST_CASE("FLEURS and TIMIT layouts import into manifests") {
  TempDir dir("import");
  const std::vector<std::int16_t> one_second(16000, 3);
  fs::create_directories(dir / "fleurs/en_us/audio/test");
  fs::create_directories(dir / "fleurs/de_de/audio/test");
  WriteRawWav(dir / "fleurs/en_us/audio/test/100.wav", 16000, 1, 16, one_second);
  WriteRawWav(dir / "fleurs/en_us/audio/test/101.wav", 16000, 1, 16, one_second);
  WriteRawWav(dir / "fleurs/de_de/audio/test/200.wav", 16000, 1, 16, one_second);
  WriteLines(dir / "fleurs/en_us/test.tsv", {"7\t100.wav\ta b c", "7\t101.wav\ta b c"});
  WriteLines(dir / "fleurs/de_de/test.tsv", {"7\t200.wav\tx y z"});
  const auto f = stab::ImportFleurs(dir / "fleurs", {"en_us", "de_de"}, "test");
  REQUIRE(f.utterances.size() == 3);
  CHECK(f.utterances[0].text_id == "7");
  CHECK(f.utterances[2].language == "de_de");
  CHECK(f.utterances[0].speaker_id != f.utterances[1].speaker_id);
  CHECK(f.sample_rate_hz == 16000);

  fs::create_directories(dir / "timit/TEST/DR1/FAKS0");
  fs::create_directories(dir / "timit/TEST/DR1/MDAB0");
  WriteRawWav(dir / "timit/TEST/DR1/FAKS0/SA1.WAV.wav", 16000, 1, 16, one_second);
  WriteRawWav(dir / "timit/TEST/DR1/MDAB0/SA1.WAV.wav", 16000, 1, 16, one_second);
  std::ofstream(dir / "timit/TEST/DR1/MDAB0/SA1.WAV") << "NIST_1A";
  const auto t = stab::ImportTimit(dir / "timit");
  REQUIRE(t.utterances.size() == 2);
  CHECK(t.utterances[0].text_id == t.utterances[1].text_id);
  CHECK(t.utterances[0].speaker_id != t.utterances[1].speaker_id);
}
