// include/stab/report.h

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

#ifndef STAB_REPORT_H_
#define STAB_REPORT_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stab/tokenizer.h"

namespace stab {

inline constexpr int kReportSchemaVersion = 1;

enum class MetricUnit { kChrf, kPercent, kScore };
std::string_view UnitName(MetricUnit unit);

struct DimensionInfo {
  std::string_view name;   // machine key in report.json
  std::string_view group;  // Invariance, Robustness, Compressibility, Vocabulary
  std::string_view label;  // default row label
  MetricUnit unit;
};

// The twelve dimensions in table order.
const std::array<DimensionInfo, 12>& Dimensions();
const DimensionInfo* FindDimension(std::string_view name);

struct DimensionEntry {
  std::string name;
  std::string label;
  MetricUnit unit = MetricUnit::kChrf;
  std::optional<double> value;  // absent when no item was eligible
  std::string reason;           // why the value is absent
  std::uint64_t n_items = 0;
  std::uint64_t skipped = 0;
  std::string aggregation = "macro";
  std::optional<double> micro;  // corpus-level value where defined
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;

  bool operator==(const DimensionEntry&) const = default;
};

struct LanguageCounts {
  std::uint64_t tokens_observed = 0;
  std::map<TokenId, std::uint64_t> counts;  // within the utilization budget

  bool operator==(const LanguageCounts&) const = default;
};

struct MetricReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version;
  TokenizerDescriptor tokenizer;
  std::string corpus_id;
  std::string corpus_digest;
  std::string config_digest;
  std::string suite;
  std::vector<DimensionEntry> dimensions;  // table order
  std::map<std::string, LanguageCounts> language_distributions;

  const DimensionEntry* Find(std::string_view name) const;
};

// Keys are sorted and numbers printed shortest-round-trip, so equal reports
// serialize to identical bytes.
std::string ReportToJson(const MetricReport& report);
MetricReport ReportFromJson(std::string_view text, std::string_view origin = "report");
MetricReport LoadReport(const std::filesystem::path& path);

// Markdown table shaped like the benchmark's headline table: grouped
// dimensions, metric column, one value column per report.
std::string RenderTable(std::span<const MetricReport> reports);

// Single-report view: the table above plus item counts and micro values.
std::string RenderReportMarkdown(const MetricReport& report);

}  // namespace stab

#endif  // STAB_REPORT_H_
