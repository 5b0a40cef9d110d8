// src/analysis.cc

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

#include "stab/analysis.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace stab {
using nlohmann::json;

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void DownstreamResults::Validate() const {
  if (tokenizer_id.empty()) throw Error("downstream entry without tokenizer_id");
  for (const auto& [task, value] : scores) {
    if (!std::isfinite(value)) throw Error("downstream " + tokenizer_id + ": score for " + task + " is not finite");
    if (!directions.count(task)) throw Error("downstream " + tokenizer_id + ": task " + task + " has no direction");
  }
}

std::vector<DownstreamResults> ParseDownstream(std::string_view text, std::string_view origin) {
  std::vector<DownstreamResults> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    DownstreamResults r;
    try {
      const json j = json::parse(line);
      r.tokenizer_id = j.at("tokenizer_id").get<std::string>();
      for (const auto& [task, v] : j.at("scores").items()) r.scores[task] = v.get<double>();
      for (const auto& [task, v] : j.at("directions").items()) {
        const std::string d = v.get<std::string>();
        if (d == "higher" || d == "higher_is_better") {
          r.directions[task] = TaskDirection::kHigherIsBetter;
        } else if (d == "lower" || d == "lower_is_better") {
          r.directions[task] = TaskDirection::kLowerIsBetter;
        } else {
          throw Error(where + ": direction for " + task + " must be \"higher\" or \"lower\"");
        }
      }
    } catch (const json::exception& e) {
      throw Error(where + ": malformed downstream record (" + e.what() + ")");
    }
    try {
      r.Validate();
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    if (!seen.insert(r.tokenizer_id).second) {
      throw Error(where + ": duplicate tokenizer_id \"" + r.tokenizer_id + "\"");
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(std::string(origin) + ": no downstream records");
  return out;
}

std::vector<DownstreamResults> LoadDownstream(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open downstream results " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseDownstream(ss.str(), path.string());
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("similarity: vectors differ in dimension");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("similarity: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double JensenShannonDivergence(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("similarity: vectors differ in dimension");
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
  }
  if (sa == 0.0 || sb == 0.0) throw Error("similarity: zero vector");
  double js = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double p = a[i] / sa, q = b[i] / sb, m = 0.5 * (p + q);
    if (p > 0) js += 0.5 * p * std::log2(p / m);
    if (q > 0) js += 0.5 * q * std::log2(q / m);
  }
  return std::clamp(js, 0.0, 1.0);
}

SimilarityMatrix ComputeSimilarity(
    const std::vector<std::pair<std::string, std::vector<double>>>& distributions) {
  if (distributions.size() < 2) throw Error("similarity: need at least two languages");
  const std::size_t n = distributions.size();
  SimilarityMatrix m;
  m.cosine.assign(n, std::vector<double>(n, 0.0));
  m.js_divergence.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m.languages.push_back(distributions[i].first);
    for (std::size_t j = i; j < n; ++j) {
      const auto& a = distributions[i].second;
      const auto& b = distributions[j].second;
      const double c = i == j ? (CosineSimilarity(a, a), 1.0) : CosineSimilarity(a, b);
      const double js = i == j ? 0.0 : JensenShannonDivergence(a, b);
      m.cosine[i][j] = m.cosine[j][i] = c;
      m.js_divergence[i][j] = m.js_divergence[j][i] = js;
    }
  }
  return m;
}

std::vector<std::pair<std::string, std::vector<double>>> ReportDistributions(
    const MetricReport& report) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  const std::size_t v = report.tokenizer.vocab_size;
  for (const auto& [lang, lc] : report.language_distributions) {
    std::vector<double> p(v, 0.0);
    std::uint64_t total = 0;
    for (const auto& [id, c] : lc.counts) total += c;
    for (const auto& [id, c] : lc.counts) {
      if (id >= v) throw Error("report distribution for " + lang + " has id outside the vocabulary");
      p[id] = total ? static_cast<double>(c) / static_cast<double>(total) : 0.0;
    }
    out.emplace_back(lang, std::move(p));
  }
  return out;
}

int RelativeSign(double a, double b) {
  const double diff = a - b;
  if (diff == 0.0) return 0;
  const double rel = b != 0.0 ? diff / std::abs(b) : diff;
  return rel > 0 ? 1 : -1;
}

const CorrelationCell& CorrelationMatrix::at(std::string_view dimension, std::string_view task) const {
  for (std::size_t r = 0; r < dimensions.size(); ++r) {
    if (dimensions[r] != dimension) continue;
    for (std::size_t c = 0; c < tasks.size(); ++c) {
      if (tasks[c] == task) return cells[r][c];
    }
  }
  throw Error("correlation: no cell for " + std::string(dimension) + " x " + std::string(task));
}

CorrelationMatrix ComputeCorrelation(std::span<const MetricReport> reports,
                                     std::span<const DownstreamResults> downstream) {
  if (reports.size() < 2) throw Error("correlation: need at least two reports");
  std::map<std::string, const DownstreamResults*> by_id;
  for (const auto& d : downstream) by_id[d.tokenizer_id] = &d;
  CorrelationMatrix m;
  std::vector<const DownstreamResults*> ds;
  std::set<std::string> ids;
  for (const auto& r : reports) {
    const std::string& id = r.tokenizer.tokenizer_id;
    if (!ids.insert(id).second) throw Error("correlation: tokenizer \"" + id + "\" appears in two reports");
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error("correlation: downstream results have no entry for tokenizer \"" + id + "\"");
    }
    m.tokenizers.push_back(id);
    ds.push_back(it->second);
  }

  std::map<std::string, TaskDirection> directions;
  for (const auto* d : ds) {
    for (const auto& [task, dir] : d->directions) {
      if (!d->scores.count(task)) continue;
      auto [it, inserted] = directions.emplace(task, dir);
      if (!inserted && it->second != dir) {
        throw Error("correlation: tokenizers disagree on the direction of task " + task);
      }
    }
  }
  for (const auto& [task, _] : directions) m.tasks.push_back(task);
  for (const auto& info : Dimensions()) {
    for (const auto& r : reports) {
      if (r.Find(info.name)) {
        m.dimensions.emplace_back(info.name);
        break;
      }
    }
  }

  const std::size_t t = reports.size();
  m.cells.assign(m.dimensions.size(), std::vector<CorrelationCell>(m.tasks.size()));
  for (std::size_t r = 0; r < m.dimensions.size(); ++r) {
    std::vector<std::optional<double>> metric(t);
    for (std::size_t i = 0; i < t; ++i) {
      if (const auto* e = reports[i].Find(m.dimensions[r])) metric[i] = e->value;
    }
    for (std::size_t c = 0; c < m.tasks.size(); ++c) {
      const std::string& task = m.tasks[c];
      const double sign = directions.at(task) == TaskDirection::kLowerIsBetter ? -1.0 : 1.0;
      std::vector<std::optional<double>> score(t);
      for (std::size_t i = 0; i < t; ++i) {
        auto it = ds[i]->scores.find(task);
        if (it != ds[i]->scores.end()) score[i] = sign * it->second;
      }
      CorrelationCell& cell = m.cells[r][c];
      bool metric_varies = false, task_varies = false;
      long sum = 0;
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = i + 1; j < t; ++j) {
          if (!metric[i] || !metric[j] || !score[i] || !score[j]) continue;
          const int dm = RelativeSign(*metric[i], *metric[j]);
          const int dd = RelativeSign(*score[i], *score[j]);
          metric_varies |= dm != 0;
          task_varies |= dd != 0;
          if (dm == 0 || dd == 0) continue;
          sum += dm * dd;
          ++cell.n_pairs;
        }
      }
      if (cell.n_pairs > 0) {
        cell.value = static_cast<double>(sum) / static_cast<double>(cell.n_pairs);
      } else if (!metric_varies && !task_varies) {
        cell.reason = "metric and task constant across tokenizers";
      } else if (!metric_varies) {
        cell.reason = "metric constant across tokenizers";
      } else if (!task_varies) {
        cell.reason = "task constant across tokenizers";
      } else {
        cell.reason = "no tokenizer pair changes both metric and task";
      }
    }
  }
  return m;
}

std::string CorrelationCsv(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "dimension,task,correlation,n_pairs,estimator,note\n";
  for (std::size_t r = 0; r < m.dimensions.size(); ++r) {
    for (std::size_t c = 0; c < m.tasks.size(); ++c) {
      const auto& cell = m.cells[r][c];
      out << m.dimensions[r] << ',' << CsvField(m.tasks[c]) << ','
          << (cell.value ? Num(*cell.value) : "") << ',' << cell.n_pairs << ','
          << kCorrelationEstimator << ',' << CsvField(cell.reason) << '\n';
    }
  }
  return out.str();
}

std::string CorrelationMatrixCsv(const CorrelationMatrix& m) {
  std::ostringstream out;
  out << "dimension";
  for (const auto& task : m.tasks) out << ',' << CsvField(task);
  out << '\n';
  for (std::size_t r = 0; r < m.dimensions.size(); ++r) {
    out << m.dimensions[r];
    for (const auto& cell : m.cells[r]) out << ',' << (cell.value ? Num(*cell.value) : "");
    out << '\n';
  }
  return out.str();
}

std::string SimilarityCsv(const std::vector<std::string>& labels,
                          const std::vector<std::vector<double>>& matrix) {
  std::ostringstream out;
  out << "language";
  for (const auto& l : labels) out << ',' << CsvField(l);
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << CsvField(labels[i]);
    for (double v : matrix[i]) out << ',' << Num(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace stab
