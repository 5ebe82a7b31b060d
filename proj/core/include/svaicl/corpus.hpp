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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svaicl {

/// CVSS v3 base severity. Underlying values follow the total order
/// Low < Medium < High < Critical.
enum class Severity : std::uint8_t { kLow = 0, kMedium = 1, kHigh = 2, kCritical = 3 };

inline constexpr std::size_t kSeverityCount = 4;

/// Iteration order used by tables and splits: Critical, High, Medium, Low.
inline constexpr std::array<Severity, kSeverityCount> kSeverityTableOrder = {
    Severity::kCritical, Severity::kHigh, Severity::kMedium, Severity::kLow};

constexpr std::size_t index_of(Severity s) { return static_cast<std::size_t>(s); }

std::string_view to_string(Severity s);

/// Case-insensitive exact name match ("high", "Critical", ...).
std::optional<Severity> severity_from_name(std::string_view name);

/// Bins a CVSS v3 base score: [9.0,10.0] Critical, [7.0,9.0) High,
/// [4.0,7.0) Medium, [0.1,4.0) Low.
/// Throws NoSeverityError for [0.0,0.1) and RangeError outside [0,10].
Severity severity_from_score(double score);

/// ISO-8601 calendar date (YYYY-MM-DD).
struct CalendarDate {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const CalendarDate&) const = default;

  /// Throws DataError on anything but a valid YYYY-MM-DD date.
  static CalendarDate parse(std::string_view text);
  std::string to_string() const;
};

struct VulnerabilityRecord {
  std::string id;
  std::string cve_id;
  std::string code;
  std::string description;
  double cvss_score = 0.0;
  Severity severity = Severity::kLow;
  std::optional<CalendarDate> collected_at;

  bool operator==(const VulnerabilityRecord&) const = default;
};

/// Loads a line-delimited JSON dataset. Severity is re-derived from the
/// score and checked against any stored label. Blank lines are skipped.
/// Throws DataError naming the line (malformed input), the id (duplicates)
/// or the record (inconsistent severity).
std::vector<VulnerabilityRecord> load_dataset(const std::filesystem::path& path);
std::vector<VulnerabilityRecord> parse_dataset(std::string_view text);

/// Writes records in load_dataset's format; severity is always stored.
void save_dataset(const std::filesystem::path& path,
                  const std::vector<VulnerabilityRecord>& records);
std::string serialize_record(const VulnerabilityRecord& record);

struct Exclusion {
  std::size_t line = 0;
  std::string id;
  std::string reason;
};

struct IngestResult {
  std::vector<VulnerabilityRecord> records;
  std::vector<Exclusion> exclusions;
};

/// Lenient variant of load_dataset for raw crawls: entries without a CVSS v3
/// score, in the "None" band, with empty fields or an inconsistent stored
/// label are reported as exclusions instead of failing the load. Malformed
/// JSON and duplicate ids are still fatal.
IngestResult ingest_dataset(std::string_view text);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

/// Per-part sizes for a class of n records. The test share is floor(n * test);
/// the remaining records are divided between train and validation by largest
/// remainder, ties going to train.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios);

struct CorpusSplit {
  std::vector<VulnerabilityRecord> train;
  std::vector<VulnerabilityRecord> validation;
  std::vector<VulnerabilityRecord> test;
  std::uint64_t seed = 0;
  SplitRatios ratios;
};

/// Stratified split. Each severity class is ordered by id, shuffled with the
/// seeded generator (classes visited Critical, High, Medium, Low) and cut
/// according to apportion(). Parts are returned sorted by id.
CorpusSplit stratified_split(const std::vector<VulnerabilityRecord>& records,
                             const SplitRatios& ratios, std::uint64_t seed);

struct CorpusStats {
  std::size_t count = 0;
  std::array<std::size_t, kSeverityCount> per_class{};  // indexed by index_of()
  double mean_code_tokens = 0;
  double median_code_tokens = 0;
  double mean_description_tokens = 0;
  double median_description_tokens = 0;
};

std::size_t count_whitespace_tokens(std::string_view text);

CorpusStats corpus_stats(const std::vector<VulnerabilityRecord>& records);

/// Text table with one column per (name, stats) pair, rows laid out as
/// Number / Number of <level> severity / Average and median tokens.
std::string render_stats_table(
    const std::vector<std::pair<std::string, CorpusStats>>& columns);

}  // namespace svaicl
