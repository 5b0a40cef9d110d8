// src/reference_tokenizer.cc

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

#include "stab/reference_tokenizer.h"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "stab/parallel.h"
#include "stab/wav.h"

namespace stab {
using nlohmann::json;

void ReferenceTokenizerConfig::Validate() const {
  if (n_mels < 1) throw Error("n_mels must be >= 1");
  if (!(window_ms > 0.0) || !(hop_ms > 0.0)) throw Error("window_ms and hop_ms must be > 0");
  if (stack < 1) throw Error("stack must be >= 1");
  if (k < 2 || k > (1 << 16)) throw Error("k must lie in [2, 65536]");
  if (max_iters < 1) throw Error("max_iters must be >= 1");
  if (!(rel_tol >= 0.0)) throw Error("rel_tol must be >= 0");
}

Digest ReferenceTokenizerConfig::digest() const {
  return Hasher()
      .Str("reference-tokenizer")
      .U64(n_mels)
      .F64(window_ms)
      .F64(hop_ms)
      .U64(stack)
      .U64(k)
      .U64(kmeans_seed)
      .U64(max_iters)
      .F64(rel_tol)
      .digest();
}

Digest ReferenceModel::digest() const {
  return Hasher()
      .U64(config.digest())
      .U64(sample_rate_hz)
      .U64(centroids.rows)
      .U64(centroids.cols)
      .Bytes(centroids.data.data(), centroids.data.size() * sizeof(float))
      .digest();
}

TokenizerDescriptor ReferenceModel::descriptor() const {
  TokenizerDescriptor d;
  d.tokenizer_id = "reference-k" + std::to_string(config.k);
  d.vocab_size = centroids.rows;
  d.frame_rate_hz = config.frame_rate_hz();
  d.adapter = AdapterKind::kBuiltin;
  d.config_hash = digest();
  return d;
}

FeatureMatrix ReferenceFeatures(std::span<const float> audio, int rate_hz,
                                const ReferenceTokenizerConfig& cfg) {
  return StackFrames(ComputeLogMel(audio, rate_hz, cfg.logmel()), cfg.stack);
}

ReferenceModel FitReferenceTokenizer(const CorpusManifest& corpus,
                                     const ReferenceTokenizerConfig& cfg, int workers,
                                     KMeansResult* fit_details) {
  cfg.Validate();
  std::vector<FeatureMatrix> per_utt(corpus.utterances.size());
  ParallelFor(per_utt.size(), workers, [&](std::size_t i) {
    const auto audio = ReadWav(corpus.utterances[i].audio_path, corpus.sample_rate_hz);
    per_utt[i] = ReferenceFeatures(audio, corpus.sample_rate_hz, cfg);
  });
  std::size_t rows = 0;
  for (const auto& f : per_utt) rows += f.rows;
  const std::size_t dim = static_cast<std::size_t>(cfg.n_mels) * cfg.stack;
  if (rows < 10 * static_cast<std::size_t>(cfg.k)) {
    throw Error("reference tokenizer: corpus yields " + std::to_string(rows) +
                " stacked frames, need at least 10*k = " + std::to_string(10 * cfg.k));
  }
  FeatureMatrix points(rows, dim);
  std::size_t at = 0;
  for (const auto& f : per_utt) {
    std::copy(f.data.begin(), f.data.end(), points.data.begin() + static_cast<long>(at * dim));
    at += f.rows;
  }
  per_utt.clear();

  KMeansOptions opts;
  opts.k = cfg.k;
  opts.seed = cfg.kmeans_seed;
  opts.max_iters = cfg.max_iters;
  opts.rel_tol = cfg.rel_tol;
  opts.workers = workers;
  KMeansResult fit = FitKMeans(points, opts);

  ReferenceModel model;
  model.config = cfg;
  model.sample_rate_hz = corpus.sample_rate_hz;
  model.centroids = fit.centroids;
  if (fit_details) *fit_details = std::move(fit);
  return model;
}

void SaveReferenceModel(const std::filesystem::path& path, const ReferenceModel& model) {
  const auto& c = model.config;
  json doc = {{"format", "stab-reference-tokenizer"},
              {"version", 1},
              {"sample_rate_hz", model.sample_rate_hz},
              {"config",
               {{"n_mels", c.n_mels},
                {"window_ms", c.window_ms},
                {"hop_ms", c.hop_ms},
                {"stack", c.stack},
                {"k", c.k},
                {"kmeans_seed", c.kmeans_seed},
                {"max_iters", c.max_iters},
                {"rel_tol", c.rel_tol}}},
              {"rows", model.centroids.rows},
              {"cols", model.centroids.cols},
              {"centroids", model.centroids.data},
              {"digest", HexDigest(model.digest())}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write model " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

ReferenceModel LoadReferenceModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model " + path.string());
  try {
    const json doc = json::parse(in);
    if (doc.at("format") != "stab-reference-tokenizer")
      throw Error(path.string() + ": not a reference tokenizer model");
    ReferenceModel m;
    const auto& c = doc.at("config");
    m.config.n_mels = c.at("n_mels").get<int>();
    m.config.window_ms = c.at("window_ms").get<double>();
    m.config.hop_ms = c.at("hop_ms").get<double>();
    m.config.stack = c.at("stack").get<int>();
    m.config.k = c.at("k").get<int>();
    m.config.kmeans_seed = c.at("kmeans_seed").get<std::uint64_t>();
    m.config.max_iters = c.at("max_iters").get<int>();
    m.config.rel_tol = c.at("rel_tol").get<double>();
    m.config.Validate();
    m.sample_rate_hz = doc.at("sample_rate_hz").get<int>();
    m.centroids.rows = doc.at("rows").get<std::size_t>();
    m.centroids.cols = doc.at("cols").get<std::size_t>();
    m.centroids.data = doc.at("centroids").get<std::vector<float>>();
    if (m.centroids.data.size() != m.centroids.rows * m.centroids.cols ||
        m.centroids.rows != static_cast<std::size_t>(m.config.k) ||
        m.centroids.cols != static_cast<std::size_t>(m.config.n_mels * m.config.stack)) {
      throw Error(path.string() + ": centroid matrix shape does not match config");
    }
    if (doc.at("digest") != HexDigest(m.digest()))
      throw Error(path.string() + ": model digest mismatch");
    return m;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": malformed model (" + e.what() + ")");
  }
}

ReferenceTokenizer::ReferenceTokenizer(ReferenceModel model)
    : model_(std::move(model)), descriptor_(model_.descriptor()) {
  descriptor_.Validate();
}

TokenSequence ReferenceTokenizer::Tokenize(const AudioInput& input) {
  if (input.rate_hz != model_.sample_rate_hz) {
    throw Error("reference tokenizer expects " + std::to_string(model_.sample_rate_hz) +
                " Hz audio, got " + std::to_string(input.rate_hz));
  }
  const FeatureMatrix feats = ReferenceFeatures(input.samples, input.rate_hz, model_.config);
  TokenSequence seq;
  seq.frame_rate_hz = descriptor_.frame_rate_hz;
  seq.source_utterance = std::string(input.utterance_id);
  seq.perturbation = std::string(input.perturbation);
  seq.tokens.reserve(feats.rows);
  for (std::size_t i = 0; i < feats.rows; ++i) {
    seq.tokens.push_back(static_cast<TokenId>(NearestCentroid(model_.centroids, feats.row(i))));
  }
  return seq;
}

}  // namespace stab
