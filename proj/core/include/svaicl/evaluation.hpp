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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svaicl/corpus.hpp"
#include "svaicl/llmclient.hpp"

namespace svaicl {

/// One scored prediction; nullopt means the answer parsed as Invalid.
struct Outcome {
  Severity truth = Severity::kLow;
  std::optional<Severity> predicted;
};

struct ConfusionMatrix {
  /// counts[truth][predicted], indexed by index_of().
  std::array<std::array<std::size_t, kSeverityCount>, kSeverityCount> counts{};
  /// Invalid answers per true class.
  std::array<std::size_t, kSeverityCount> invalid_by_truth{};

  void add(const Outcome& outcome);
  std::size_t invalid_count() const;
  std::size_t total() const;
  std::size_t correct() const;
  std::size_t true_count(Severity s) const;       // row sum incl. Invalid
  std::size_t predicted_count(Severity s) const;  // column sum
};

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

/// Settings a report was produced under.
struct RunMetadata {
  double lambda = 0.4;
  double phi = 0.7;
  std::size_t top_n = 10;
  std::size_t shots = 4;
  std::string ordering = "similarity";
  std::string selection = "relevance";
  std::uint64_t seed = 0;
  std::string model;
};

struct MetricsReport {
  std::size_t instances = 0;
  std::size_t correct = 0;
  std::size_t invalid = 0;
  double accuracy = 0;
  /// Mean F1 over the classes present in the truth or the predictions.
  double macro_f1 = 0;
  /// Gorodkin's K-class MCC; 0 with mcc_undefined set when the denominator vanishes.
  double mcc = 0;
  bool mcc_undefined = false;
  std::array<ClassMetrics, kSeverityCount> per_class{};
  ConfusionMatrix matrix;
  RunMetadata run;
};

ConfusionMatrix confusion_matrix(std::span<const Outcome> outcomes);
MetricsReport metrics_from_confusion(const ConfusionMatrix& matrix);

/// Throws DataError on empty input.
MetricsReport compute_metrics(std::span<const Outcome> outcomes);
MetricsReport compute_metrics(const std::vector<AssessmentResult>& results);

/// One line of the per-instance log.
struct InstanceRecord {
  std::string target_id;
  Severity truth = Severity::kLow;
  std::optional<Severity> predicted;
  std::string raw;
  std::vector<std::string> demo_ids;  // prompt order
  std::vector<double> fused;          // parallel to demo_ids
  std::string prompt_hash;
  std::size_t prompt_tokens = 0;
  bool truncated = false;

  /// Mean fused similarity over the demos; nullopt for zero-shot.
  std::optional<double> mean_fused() const;
  Outcome outcome() const { return {truth, predicted}; }
};

MetricsReport compute_metrics(const std::vector<InstanceRecord>& log);

std::string instance_log_line(const InstanceRecord& record);
std::string render_instance_log(const std::vector<InstanceRecord>& log);
/// Throws DataError naming the line on malformed input.
std::vector<InstanceRecord> parse_instance_log(std::string_view text);

struct SimilarityBucket {
  double lower = 0;
  double upper = 1;
  bool upper_inclusive = false;
  std::size_t size = 0;
  std::optional<MetricsReport> metrics;  // nullopt when empty

  std::string label() const;  // "[0, 0.2)", "[0.5, 1]"
};

struct BucketReport {
  std::vector<SimilarityBucket> buckets;
  std::size_t zero_shot_excluded = 0;
};

inline constexpr std::array<double, 2> kDefaultBucketBounds = {0.2, 0.5};

/// Partitions instances by mean fused similarity into [0,b1), [b1,b2), ...,
/// [bn,1]. Means below 0 fall into the first bucket and above 1 into the last.
/// Instances without demonstrations are left out and counted. Throws
/// UsageError unless bounds are strictly increasing inside (0, 1).
BucketReport bucket_by_similarity(const std::vector<InstanceRecord>& log,
                                  std::span<const double> bounds = kDefaultBucketBounds);

struct DateFilterResult {
  std::vector<VulnerabilityRecord> records;
  std::size_t undated = 0;
};

/// Records collected strictly after `cutoff`; undated records are dropped and counted.
DateFilterResult filter_by_date(const std::vector<VulnerabilityRecord>& records,
                                const CalendarDate& cutoff);

/// Percentages with two decimals.
std::string format_percent(double value);

std::string render_metrics_text(const MetricsReport& report);
/// Stable key order; identical inputs give identical bytes.
std::string metrics_json(const MetricsReport& report);
std::string render_bucket_table(const BucketReport& report);
std::string bucket_json(const BucketReport& report);

}  // namespace svaicl
