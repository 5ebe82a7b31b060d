// Copyright 2026 The svaicl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svaicl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "svaicl/error.hpp"
#include "table.hpp"

namespace svaicl {

namespace {

using ojson = nlohmann::ordered_json;

std::string prediction_name(const std::optional<Severity>& p) {
  return p ? std::string(to_string(*p)) : std::string("Invalid");
}

std::string bound_text(double v) { return fmt::format("{:g}", v); }

}  // namespace

void ConfusionMatrix::add(const Outcome& outcome) {
  const auto t = index_of(outcome.truth);
  if (outcome.predicted) {
    ++counts[t][index_of(*outcome.predicted)];
  } else {
    ++invalid_by_truth[t];
  }
}

std::size_t ConfusionMatrix::invalid_count() const {
  std::size_t n = 0;
  for (auto v : invalid_by_truth) n += v;
  return n;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = invalid_count();
  for (const auto& row : counts)
    for (auto v : row) n += v;
  return n;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < kSeverityCount; ++k) n += counts[k][k];
  return n;
}

std::size_t ConfusionMatrix::true_count(Severity s) const {
  const auto t = index_of(s);
  std::size_t n = invalid_by_truth[t];
  for (auto v : counts[t]) n += v;
  return n;
}

std::size_t ConfusionMatrix::predicted_count(Severity s) const {
  const auto p = index_of(s);
  std::size_t n = 0;
  for (const auto& row : counts) n += row[p];
  return n;
}

ConfusionMatrix confusion_matrix(std::span<const Outcome> outcomes) {
  ConfusionMatrix m;
  for (const auto& o : outcomes) m.add(o);
  return m;
}

MetricsReport metrics_from_confusion(const ConfusionMatrix& matrix) {
  MetricsReport r;
  r.matrix = matrix;
  r.instances = matrix.total();
  if (r.instances == 0) throw DataError("cannot compute metrics over zero instances");
  r.correct = matrix.correct();
  r.invalid = matrix.invalid_count();
  const double s = static_cast<double>(r.instances);
  const double c = static_cast<double>(r.correct);
  r.accuracy = c / s;

  double f1_sum = 0;
  std::size_t present = 0;
  double sum_pt = 0;
  double sum_pp = 0;
  double sum_tt = 0;
  for (std::size_t k = 0; k < kSeverityCount; ++k) {
    const auto level = static_cast<Severity>(k);
    const double tp = static_cast<double>(matrix.counts[k][k]);
    const double t = static_cast<double>(matrix.true_count(level));
    const double p = static_cast<double>(matrix.predicted_count(level));
    ClassMetrics& cm = r.per_class[k];
    cm.support = matrix.true_count(level);
    cm.precision = p > 0 ? tp / p : 0.0;
    cm.recall = t > 0 ? tp / t : 0.0;
    cm.f1 = cm.precision + cm.recall > 0
                ? 2 * cm.precision * cm.recall / (cm.precision + cm.recall)
                : 0.0;
    if (t > 0 || p > 0) {
      f1_sum += cm.f1;
      ++present;
    }
    sum_pt += p * t;
    sum_pp += p * p;
    sum_tt += t * t;
  }
  r.macro_f1 = present > 0 ? f1_sum / static_cast<double>(present) : 0.0;

  const double denom = (s * s - sum_pp) * (s * s - sum_tt);
  if (denom <= 0) {
    r.mcc = 0;
    r.mcc_undefined = true;
  } else {
    r.mcc = std::clamp((c * s - sum_pt) / std::sqrt(denom), -1.0, 1.0);
  }
  return r;
}

MetricsReport compute_metrics(std::span<const Outcome> outcomes) {
  if (outcomes.empty()) throw DataError("cannot compute metrics over zero instances");
  return metrics_from_confusion(confusion_matrix(outcomes));
}

MetricsReport compute_metrics(const std::vector<AssessmentResult>& results) {
  std::vector<Outcome> outcomes;
  outcomes.reserve(results.size());
  for (const auto& r : results) outcomes.push_back({r.truth, r.predicted});
  return compute_metrics(std::span<const Outcome>(outcomes));
}

MetricsReport compute_metrics(const std::vector<InstanceRecord>& log) {
  std::vector<Outcome> outcomes;
  outcomes.reserve(log.size());
  for (const auto& r : log) outcomes.push_back(r.outcome());
  return compute_metrics(std::span<const Outcome>(outcomes));
}

std::optional<double> InstanceRecord::mean_fused() const {
  if (fused.empty()) return std::nullopt;
  double sum = 0;
  for (double f : fused) sum += f;
  return sum / static_cast<double>(fused.size());
}

std::string instance_log_line(const InstanceRecord& record) {
  ojson j;
  j["target_id"] = record.target_id;
  j["truth"] = to_string(record.truth);
  j["predicted"] = prediction_name(record.predicted);
  j["raw"] = record.raw;
  j["demo_ids"] = record.demo_ids;
  j["fused"] = record.fused;
  if (auto m = record.mean_fused()) {
    j["mean_fused"] = *m;
  } else {
    j["mean_fused"] = nullptr;
  }
  j["prompt_hash"] = record.prompt_hash;
  j["prompt_tokens"] = record.prompt_tokens;
  j["truncated"] = record.truncated;
  return j.dump();
}

std::string render_instance_log(const std::vector<InstanceRecord>& log) {
  std::string out;
  for (const auto& r : log) {
    out += instance_log_line(r);
    out += '\n';
  }
  return out;
}

std::vector<InstanceRecord> parse_instance_log(std::string_view text) {
  std::vector<InstanceRecord> log;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      InstanceRecord r;
      r.target_id = j.at("target_id").get<std::string>();
      const auto truth = severity_from_name(j.at("truth").get<std::string>());
      if (!truth) throw DataError("unknown truth label");
      r.truth = *truth;
      r.predicted = severity_from_name(j.at("predicted").get<std::string>());
      r.raw = j.value("raw", std::string{});
      r.demo_ids = j.at("demo_ids").get<std::vector<std::string>>();
      r.fused = j.at("fused").get<std::vector<double>>();
      if (r.fused.size() != r.demo_ids.size()) throw DataError("fused and demo_ids differ in length");
      r.prompt_hash = j.value("prompt_hash", std::string{});
      r.prompt_tokens = j.value("prompt_tokens", std::size_t{0});
      r.truncated = j.value("truncated", false);
      log.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("instance log line {}: {}", line_no, e.what()));
    } catch (const DataError& e) {
      throw DataError(fmt::format("instance log line {}: {}", line_no, e.what()));
    }
  }
  return log;
}

std::string SimilarityBucket::label() const {
  return fmt::format("[{}, {}{}", bound_text(lower), bound_text(upper), upper_inclusive ? "]" : ")");
}

BucketReport bucket_by_similarity(const std::vector<InstanceRecord>& log,
                                  std::span<const double> bounds) {
  double prev = 0.0;
  for (double b : bounds) {
    if (!(b > prev && b < 1.0))
      throw UsageError(fmt::format("bucket bounds must increase strictly inside (0, 1); got {}", b));
    prev = b;
  }
  BucketReport report;
  std::vector<double> edges{0.0};
  edges.insert(edges.end(), bounds.begin(), bounds.end());
  edges.push_back(1.0);
  std::vector<std::vector<Outcome>> members(edges.size() - 1);
  for (const auto& r : log) {
    const auto mean = r.mean_fused();
    if (!mean) {
      ++report.zero_shot_excluded;
      continue;
    }
    std::size_t b = 0;
    while (b + 1 < members.size() && *mean >= edges[b + 1]) ++b;
    members[b].push_back(r.outcome());
  }
  for (std::size_t b = 0; b < members.size(); ++b) {
    SimilarityBucket bucket;
    bucket.lower = edges[b];
    bucket.upper = edges[b + 1];
    bucket.upper_inclusive = b + 1 == members.size();
    bucket.size = members[b].size();
    if (!members[b].empty()) bucket.metrics = compute_metrics(std::span<const Outcome>(members[b]));
    report.buckets.push_back(std::move(bucket));
  }
  return report;
}

DateFilterResult filter_by_date(const std::vector<VulnerabilityRecord>& records,
                                const CalendarDate& cutoff) {
  DateFilterResult out;
  for (const auto& r : records) {
    if (!r.collected_at) {
      ++out.undated;
    } else if (*r.collected_at > cutoff) {
      out.records.push_back(r);
    }
  }
  return out;
}

std::string format_percent(double value) { return fmt::format("{:.2f}", value * 100.0); }

std::string render_metrics_text(const MetricsReport& r) {
  std::string out;
  out += fmt::format("Run: lambda={:g} phi={:g} top_n={} shots={} ordering={} selection={} seed={} model={}\n",
                     r.run.lambda, r.run.phi, r.run.top_n, r.run.shots, r.run.ordering,
                     r.run.selection, r.run.seed, r.run.model);
  out += fmt::format("Instances: {}  Correct: {}  Invalid: {}\n\n", r.instances, r.correct, r.invalid);
  out += detail::markdown_table(
      {"Accuracy (%)", "F1-score (%)", "MCC (%)"},
      {{format_percent(r.accuracy), format_percent(r.macro_f1),
        format_percent(r.mcc) + (r.mcc_undefined ? " (undefined)" : "")}});
  out += '\n';
  std::vector<std::vector<std::string>> rows;
  for (Severity s : kSeverityTableOrder) {
    const auto& c = r.per_class[index_of(s)];
    rows.push_back({std::string(to_string(s)), format_percent(c.precision), format_percent(c.recall),
                    format_percent(c.f1), std::to_string(c.support)});
  }
  out += detail::markdown_table({"Severity", "Precision (%)", "Recall (%)", "F1-score (%)", "Support"},
                                rows);
  out += '\n';
  rows.clear();
  for (Severity t : kSeverityTableOrder) {
    std::vector<std::string> row{std::string(to_string(t))};
    for (Severity p : kSeverityTableOrder)
      row.push_back(std::to_string(r.matrix.counts[index_of(t)][index_of(p)]));
    row.push_back(std::to_string(r.matrix.invalid_by_truth[index_of(t)]));
    rows.push_back(std::move(row));
  }
  out += detail::markdown_table({"Truth \\ Predicted", "Critical", "High", "Medium", "Low", "Invalid"},
                                rows);
  return out;
}

namespace {

ojson metrics_object(const MetricsReport& r) {
  ojson j;
  j["instances"] = r.instances;
  j["correct"] = r.correct;
  j["invalid"] = r.invalid;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["mcc"] = r.mcc;
  j["mcc_undefined"] = r.mcc_undefined;
  ojson per_class = ojson::object();
  for (Severity s : kSeverityTableOrder) {
    const auto& c = r.per_class[index_of(s)];
    per_class[std::string(to_string(s))] = {
        {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
  }
  j["per_class"] = per_class;
  ojson confusion = ojson::object();
  for (Severity t : kSeverityTableOrder) {
    ojson row = ojson::object();
    for (Severity p : kSeverityTableOrder)
      row[std::string(to_string(p))] = r.matrix.counts[index_of(t)][index_of(p)];
    row["Invalid"] = r.matrix.invalid_by_truth[index_of(t)];
    confusion[std::string(to_string(t))] = row;
  }
  j["confusion"] = confusion;
  return j;
}

}  // namespace

std::string metrics_json(const MetricsReport& r) {
  ojson j;
  j["run"] = {{"lambda", r.run.lambda},   {"phi", r.run.phi},
              {"top_n", r.run.top_n},     {"shots", r.run.shots},
              {"ordering", r.run.ordering}, {"selection", r.run.selection},
              {"seed", r.run.seed},       {"model", r.run.model}};
  j["metrics"] = metrics_object(r);
  return j.dump(2) + "\n";
}

std::string render_bucket_table(const BucketReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& b : report.buckets) {
    if (b.metrics) {
      rows.push_back({b.label(), std::to_string(b.size), format_percent(b.metrics->accuracy),
                      format_percent(b.metrics->macro_f1),
                      format_percent(b.metrics->mcc) + (b.metrics->mcc_undefined ? " (undefined)" : "")});
    } else {
      rows.push_back({b.label(), "0", "-", "-", "-"});
    }
  }
  std::string out = detail::markdown_table(
      {"Avg. Sim. Range", "No. Samp.", "Accuracy (%)", "F1-score (%)", "MCC (%)"}, rows);
  if (report.zero_shot_excluded > 0)
    out += fmt::format("\n{} zero-shot instances excluded.\n", report.zero_shot_excluded);
  return out;
}

std::string bucket_json(const BucketReport& report) {
  ojson buckets = ojson::array();
  for (const auto& b : report.buckets) {
    ojson j;
    j["range"] = b.label();
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["size"] = b.size;
    if (b.metrics) {
      j["metrics"] = metrics_object(*b.metrics);
    } else {
      j["metrics"] = nullptr;
    }
    buckets.push_back(std::move(j));
  }
  ojson j;
  j["buckets"] = buckets;
  j["zero_shot_excluded"] = report.zero_shot_excluded;
  return j.dump(2) + "\n";
}

}  // namespace svaicl
