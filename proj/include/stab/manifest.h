// include/stab/manifest.h

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

#ifndef STAB_MANIFEST_H_
#define STAB_MANIFEST_H_

#include <filesystem>
#include <string>
#include <vector>

#include "stab/base.h"

namespace stab {

struct UtteranceRecord {
  std::string utterance_id;
  std::filesystem::path audio_path;  // absolute after loading
  std::string language;
  std::string speaker_id;
  std::string text_id;  // parallel-sentence key
  double duration_s = 0.0;

  bool operator==(const UtteranceRecord&) const = default;
};

struct CorpusManifest {
  std::string corpus_id;
  int sample_rate_hz = 16000;
  std::vector<UtteranceRecord> utterances;  // order is significant

  bool operator==(const CorpusManifest&) const = default;
};

struct ManifestLoadOptions {
  // Used when the file carries no header line.
  int default_sample_rate_hz = 16000;
  // Probe every referenced WAV (format, rate, duration within 1%).
  bool verify_audio = true;
};

// Line-delimited JSON. An optional first line {"corpus_id":..,
// "sample_rate_hz":..} sets corpus-level fields; every other line is one
// UtteranceRecord. Relative audio paths resolve against the manifest's
// directory.
CorpusManifest LoadManifest(const std::filesystem::path& path,
                            const ManifestLoadOptions& options = {});

// Writes the header line and records; audio paths below the manifest's
// directory are stored relative to it.
void WriteManifest(const std::filesystem::path& path,
                   const CorpusManifest& manifest);

// Digest over corpus-level fields and record metadata. Audio paths are not
// included.
Digest ManifestDigest(const CorpusManifest& manifest);

// Converters for public corpus layouts. FLEURS: <root>/<lang>/<split>.tsv
// with audio in <root>/<lang>/audio/<split>/; recordings carry no speaker
// label, so each file is its own speaker. TIMIT: <root>/{TRAIN,TEST}/DR*/
// <speaker>/<sentence>.wav, RIFF-converted.
CorpusManifest ImportFleurs(const std::filesystem::path& root,
                            const std::vector<std::string>& languages,
                            const std::string& split);
CorpusManifest ImportTimit(const std::filesystem::path& root);

}  // namespace stab

#endif  // STAB_MANIFEST_H_
