// src/manifest.cc

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

#include "stab/manifest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stab/wav.h"

namespace stab {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string RequireString(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(std::string("missing field \"") + key + "\"");
  if (!it->is_string()) throw Error(std::string("field \"") + key + "\" must be a string");
  std::string s = it->get<std::string>();
  if (s.empty()) throw Error(std::string("field \"") + key + "\" is empty");
  return s;
}

void VerifyAudio(const UtteranceRecord& rec, int rate_hz) {
  if (!fs::exists(rec.audio_path))
    throw Error("missing audio file " + rec.audio_path.string());
  const WavInfo info = ProbeWav(rec.audio_path);
  if (info.sample_rate_hz != rate_hz) {
    throw Error(rec.audio_path.string() + ": sample rate " +
                std::to_string(info.sample_rate_hz) + " Hz, manifest says " +
                std::to_string(rate_hz));
  }
  const double actual = static_cast<double>(info.num_frames) / rate_hz;
  if (std::abs(actual - rec.duration_s) > 0.01 * rec.duration_s) {
    std::ostringstream msg;
    msg << "utterance " << rec.utterance_id << ": duration_s " << rec.duration_s
        << " disagrees with audio length " << actual << " s";
    throw Error(msg.str());
  }
}

}  // namespace

CorpusManifest LoadManifest(const fs::path& path,
                            const ManifestLoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  const fs::path base = fs::absolute(path).parent_path();

  CorpusManifest m;
  m.corpus_id = path.stem().string();
  m.sample_rate_hz = options.default_sample_rate_hz;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      json obj = json::parse(line);
      if (!obj.is_object()) throw Error("record is not an object");
      if (header_allowed && obj.contains("corpus_id") && !obj.contains("utterance_id")) {
        m.corpus_id = RequireString(obj, "corpus_id");
        if (obj.contains("sample_rate_hz"))
          m.sample_rate_hz = obj.at("sample_rate_hz").get<int>();
        if (m.sample_rate_hz <= 0) throw Error("sample_rate_hz must be positive");
        header_allowed = false;
        continue;
      }
      header_allowed = false;
      UtteranceRecord rec;
      rec.utterance_id = RequireString(obj, "utterance_id");
      fs::path audio = RequireString(obj, "audio_path");
      rec.audio_path = (audio.is_absolute() ? audio : base / audio).lexically_normal();
      rec.language = RequireString(obj, "language");
      rec.speaker_id = RequireString(obj, "speaker_id");
      rec.text_id = RequireString(obj, "text_id");
      auto dur = obj.find("duration_s");
      if (dur == obj.end() || !dur->is_number())
        throw Error("field \"duration_s\" must be a number");
      rec.duration_s = dur->get<double>();
      if (!(rec.duration_s > 0.0) || !std::isfinite(rec.duration_s))
        throw Error("duration_s must be positive");
      if (!seen.insert(rec.utterance_id).second)
        throw Error("duplicate utterance_id \"" + rec.utterance_id + "\"");
      m.utterances.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw Error(where + "malformed record (" + e.what() + ")");
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
  }
  if (m.utterances.empty()) throw Error(path.string() + ": empty manifest");
  if (options.verify_audio) {
    for (const auto& rec : m.utterances) VerifyAudio(rec, m.sample_rate_hz);
  }
  return m;
}

void WriteManifest(const fs::path& path, const CorpusManifest& manifest) {
  const fs::path base = fs::absolute(path).parent_path().lexically_normal();
  std::ostringstream out;
  out << json{{"corpus_id", manifest.corpus_id},
              {"sample_rate_hz", manifest.sample_rate_hz}}
             .dump()
      << '\n';
  for (const auto& rec : manifest.utterances) {
    fs::path audio = fs::absolute(rec.audio_path).lexically_normal();
    fs::path rel = audio.lexically_relative(base);
    const bool inside = !rel.empty() && *rel.begin() != "..";
    json obj = {{"utterance_id", rec.utterance_id},
                {"audio_path", (inside ? rel : audio).generic_string()},
                {"language", rec.language},
                {"speaker_id", rec.speaker_id},
                {"text_id", rec.text_id},
                {"duration_s", rec.duration_s}};
    out << obj.dump() << '\n';
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error("cannot write manifest " + path.string());
  f << out.str();
  if (!f) throw Error("write failed: " + path.string());
}

Digest ManifestDigest(const CorpusManifest& manifest) {
  Hasher h;
  h.Str(manifest.corpus_id).U64(static_cast<std::uint64_t>(manifest.sample_rate_hz));
  h.U64(manifest.utterances.size());
  for (const auto& r : manifest.utterances) {
    h.Str(r.utterance_id).Str(r.language).Str(r.speaker_id).Str(r.text_id).F64(r.duration_s);
  }
  return h.digest();
}

namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, '\t')) cols.push_back(cur);
  return cols;
}

UtteranceRecord Probed(std::string id, fs::path audio, std::string language,
                       std::string speaker, std::string text, int* rate_hz) {
  const WavInfo info = ProbeWav(audio);
  if (*rate_hz == 0) *rate_hz = info.sample_rate_hz;
  if (info.sample_rate_hz != *rate_hz)
    throw Error(audio.string() + ": mixed sample rates in corpus");
  UtteranceRecord r;
  r.utterance_id = std::move(id);
  r.audio_path = fs::absolute(audio).lexically_normal();
  r.language = std::move(language);
  r.speaker_id = std::move(speaker);
  r.text_id = std::move(text);
  r.duration_s = static_cast<double>(info.num_frames) / info.sample_rate_hz;
  return r;
}

std::string Upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

CorpusManifest ImportFleurs(const fs::path& root,
                            const std::vector<std::string>& languages,
                            const std::string& split) {
  CorpusManifest m;
  m.corpus_id = "fleurs-" + split;
  int rate = 0;
  for (const auto& lang : languages) {
    const fs::path tsv = root / lang / (split + ".tsv");
    std::ifstream in(tsv);
    if (!in) throw Error("cannot open " + tsv.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto cols = SplitTabs(line);
      if (cols.size() < 2)
        throw Error(tsv.string() + ":" + std::to_string(line_no) + ": expected id and file_name columns");
      const fs::path audio = root / lang / "audio" / split / cols[1];
      const std::string stem = fs::path(cols[1]).stem().string();
      m.utterances.push_back(
          Probed(lang + "/" + stem, audio, lang, stem, cols[0], &rate));
    }
  }
  if (m.utterances.empty()) throw Error("FLEURS import found no recordings");
  m.sample_rate_hz = rate;
  return m;
}

CorpusManifest ImportTimit(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    if (Upper(e.path().extension().string()) == ".WAV") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  CorpusManifest m;
  m.corpus_id = "timit";
  int rate = 0;
  std::set<std::string> seen;
  for (const auto& f : files) {
    // TIMIT ships NIST SPHERE files named *.WAV; converted copies are often
    // named *.WAV.wav. Skip the originals when a converted copy exists.
    std::string sentence = f.stem().string();
    if (Upper(fs::path(sentence).extension().string()) == ".WAV") {
      sentence = fs::path(sentence).stem().string();
    } else {
      fs::path converted = f;
      converted += ".wav";
      if (fs::exists(converted)) continue;
    }
    const std::string speaker = f.parent_path().filename().string();
    const std::string id = Upper(speaker) + "_" + Upper(sentence);
    if (!seen.insert(id).second) continue;
    try {
      m.utterances.push_back(Probed(id, f, "en", Upper(speaker), Upper(sentence), &rate));
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (convert NIST SPHERE audio to RIFF WAV first)");
    }
  }
  if (m.utterances.empty()) throw Error("TIMIT import found no recordings under " + root.string());
  m.sample_rate_hz = rate;
  return m;
}

}  // namespace stab
