// src/report.cc

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

#include "stab/report.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace stab {
using nlohmann::json;

std::string_view UnitName(MetricUnit unit) {
  switch (unit) {
    case MetricUnit::kChrf:
      return "chrF";
    case MetricUnit::kPercent:
      return "percent";
    case MetricUnit::kScore:
      return "score";
  }
  return "?";
}

namespace {

MetricUnit ParseUnit(const std::string& s) {
  if (s == "chrF") return MetricUnit::kChrf;
  if (s == "percent") return MetricUnit::kPercent;
  if (s == "score") return MetricUnit::kScore;
  throw Error("unknown metric unit \"" + s + "\"");
}

AdapterKind ParseAdapter(const std::string& s) {
  if (s == "builtin") return AdapterKind::kBuiltin;
  if (s == "files") return AdapterKind::kFiles;
  if (s == "subprocess") return AdapterKind::kSubprocess;
  throw Error("unknown adapter kind \"" + s + "\"");
}

std::string_view TableUnit(MetricUnit unit) {
  switch (unit) {
    case MetricUnit::kChrf:
      return "chrF";
    case MetricUnit::kPercent:
      return "%";
    case MetricUnit::kScore:
      return "Score";
  }
  return "";
}

std::string Fixed(std::optional<double> v, int digits = 1) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
  return buf;
}

}  // namespace

const std::array<DimensionInfo, 12>& Dimensions() {
  static const std::array<DimensionInfo, 12> kDims = {{
      {"speaker_invariance", "Invariance", "Speaker Invariance", MetricUnit::kChrf},
      {"context_invariance", "Invariance", "Context Invariance", MetricUnit::kChrf},
      {"language_invariance", "Invariance", "Language Invariance", MetricUnit::kChrf},
      {"pitch_change", "Robustness", "Pitch Change", MetricUnit::kChrf},
      {"gaussian_noise", "Robustness", "Gaussian Noise", MetricUnit::kChrf},
      {"speed_change", "Robustness", "Speed Change", MetricUnit::kChrf},
      {"huffman_efficiency", "Compressibility", "Huffman Efficiency", MetricUnit::kPercent},
      {"bpe_efficiency", "Compressibility", "Byte-pair Efficiency", MetricUnit::kPercent},
      {"dedup_efficiency", "Compressibility", "De-duplication Efficiency", MetricUnit::kPercent},
      {"per_language_utilization", "Vocabulary", "Per-language Utilization", MetricUnit::kPercent},
      {"overall_utilization", "Vocabulary", "Overall Utilization", MetricUnit::kPercent},
      {"vocabulary_entropy", "Vocabulary", "Vocabulary Entropy", MetricUnit::kScore},
  }};
  return kDims;
}

const DimensionInfo* FindDimension(std::string_view name) {
  for (const auto& d : Dimensions()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const DimensionEntry* MetricReport::Find(std::string_view name) const {
  for (const auto& d : dimensions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::string ReportToJson(const MetricReport& report) {
  json dims = json::object();
  for (const auto& d : report.dimensions) {
    json e = {{"label", d.label},
              {"unit", UnitName(d.unit)},
              {"n_items", d.n_items},
              {"skipped", d.skipped},
              {"aggregation", d.aggregation},
              {"value", d.value ? json(*d.value) : json(nullptr)}};
    if (d.micro) e["micro"] = *d.micro;
    if (!d.reason.empty()) e["reason"] = d.reason;
    if (!d.diagnostics.empty()) e["diagnostics"] = d.diagnostics;
    if (!d.notes.empty()) e["notes"] = d.notes;
    dims[d.name] = std::move(e);
  }
  json dists = json::object();
  for (const auto& [lang, lc] : report.language_distributions) {
    json counts = json::array();
    for (const auto& [id, c] : lc.counts) counts.push_back({id, c});
    dists[lang] = {{"tokens_observed", lc.tokens_observed}, {"counts", std::move(counts)}};
  }
  const auto& t = report.tokenizer;
  json doc = {{"schema_version", report.schema_version},
              {"tool_version", report.tool_version},
              {"tokenizer",
               {{"tokenizer_id", t.tokenizer_id},
                {"vocab_size", t.vocab_size},
                {"frame_rate_hz", t.frame_rate_hz},
                {"adapter", AdapterName(t.adapter)},
                {"config_hash", HexDigest(t.config_hash)}}},
              {"corpus_id", report.corpus_id},
              {"corpus_digest", report.corpus_digest},
              {"config_digest", report.config_digest},
              {"suite", report.suite},
              {"dimensions", std::move(dims)},
              {"language_distributions", std::move(dists)}};
  return doc.dump(2) + "\n";
}

MetricReport ReportFromJson(std::string_view text, std::string_view origin) {
  try {
    const json doc = json::parse(text);
    MetricReport r;
    r.schema_version = doc.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw Error(std::string(origin) + ": unsupported schema_version " +
                  std::to_string(r.schema_version));
    }
    r.tool_version = doc.at("tool_version").get<std::string>();
    const auto& t = doc.at("tokenizer");
    r.tokenizer.tokenizer_id = t.at("tokenizer_id").get<std::string>();
    r.tokenizer.vocab_size = t.at("vocab_size").get<std::size_t>();
    r.tokenizer.frame_rate_hz = t.at("frame_rate_hz").get<double>();
    r.tokenizer.adapter = ParseAdapter(t.at("adapter").get<std::string>());
    r.tokenizer.config_hash = std::stoull(t.at("config_hash").get<std::string>(), nullptr, 16);
    r.corpus_id = doc.at("corpus_id").get<std::string>();
    r.corpus_digest = doc.at("corpus_digest").get<std::string>();
    r.config_digest = doc.at("config_digest").get<std::string>();
    r.suite = doc.at("suite").get<std::string>();
    const auto& dims = doc.at("dimensions");
    for (const auto& info : Dimensions()) {
      auto it = dims.find(std::string(info.name));
      if (it == dims.end()) continue;
      DimensionEntry d;
      d.name = std::string(info.name);
      d.label = it->value("label", std::string(info.label));
      d.unit = ParseUnit(it->at("unit").get<std::string>());
      if (!it->at("value").is_null()) d.value = it->at("value").get<double>();
      d.n_items = it->at("n_items").get<std::uint64_t>();
      d.skipped = it->at("skipped").get<std::uint64_t>();
      d.aggregation = it->at("aggregation").get<std::string>();
      if (it->contains("micro")) d.micro = it->at("micro").get<double>();
      d.reason = it->value("reason", std::string());
      if (it->contains("diagnostics")) d.diagnostics = it->at("diagnostics").get<std::map<std::string, double>>();
      if (it->contains("notes")) d.notes = it->at("notes").get<std::vector<std::string>>();
      r.dimensions.push_back(std::move(d));
    }
    for (const auto& [name, _] : dims.items()) {
      if (!FindDimension(name)) throw Error(std::string(origin) + ": unknown dimension \"" + name + "\"");
    }
    if (doc.contains("language_distributions")) {
      for (const auto& [lang, v] : doc.at("language_distributions").items()) {
        LanguageCounts lc;
        lc.tokens_observed = v.at("tokens_observed").get<std::uint64_t>();
        for (const auto& pair : v.at("counts")) {
          lc.counts[pair.at(0).get<TokenId>()] = pair.at(1).get<std::uint64_t>();
        }
        r.language_distributions[lang] = std::move(lc);
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string(origin) + ": malformed report (" + e.what() + ")");
  }
}

MetricReport LoadReport(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open report " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ReportFromJson(ss.str(), path.string());
}

std::string RenderTable(std::span<const MetricReport> reports) {
  std::ostringstream out;
  out << "| | Dimensions | Metrics |";
  for (const auto& r : reports) out << ' ' << r.tokenizer.tokenizer_id << " |";
  out << "\n|---|---|---|";
  for (std::size_t i = 0; i < reports.size(); ++i) out << "---:|";
  out << '\n';
  std::string_view group;
  for (const auto& info : Dimensions()) {
    std::string label(info.label);
    for (const auto& r : reports) {
      if (const auto* d = r.Find(info.name)) {
        label = d->label;
        break;
      }
    }
    out << "| " << (info.group != group ? "**" + std::string(info.group) + "**" : "") << " | "
        << label << " | " << TableUnit(info.unit) << " |";
    group = info.group;
    for (const auto& r : reports) {
      const auto* d = r.Find(info.name);
      out << ' ' << (d ? Fixed(d->value) : std::string("-")) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string RenderReportMarkdown(const MetricReport& report) {
  std::ostringstream out;
  const auto& t = report.tokenizer;
  out << "# Tokenizer assessment: " << t.tokenizer_id << "\n\n"
      << "- vocabulary size: " << t.vocab_size << "\n"
      << "- frame rate: " << t.frame_rate_hz << " Hz\n"
      << "- adapter: " << AdapterName(t.adapter) << "\n"
      << "- corpus: " << report.corpus_id << " (digest " << report.corpus_digest << ")\n"
      << "- config digest: " << report.config_digest << "\n"
      << "- tool version: " << report.tool_version << "\n\n";
  out << RenderTable(std::span<const MetricReport>(&report, 1)) << '\n';
  out << "| Dimension | Macro | Micro | Items | Skipped | Notes |\n"
      << "|---|---:|---:|---:|---:|---|\n";
  for (const auto& d : report.dimensions) {
    std::string notes = d.reason;
    for (const auto& n : d.notes) notes += (notes.empty() ? "" : "; ") + n;
    out << "| " << d.label << " | " << Fixed(d.value, 2) << " | "
        << (d.micro ? Fixed(d.micro, 2) : std::string("-")) << " | " << d.n_items << " | "
        << d.skipped << " | " << notes << " |\n";
  }
  return out.str();
}

}  // namespace stab
