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

#include "svaicl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "svaicl/error.hpp"
#include "svaicl/random.hpp"

namespace svaicl {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits on '\n', tolerating a trailing '\r'. Line numbers are 1-based.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line_no, line);
  }
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

struct RawRecord {
  VulnerabilityRecord record;
  std::optional<double> score;
  std::optional<Severity> stored;
};

const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                              std::size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    throw DataError(fmt::format("line {}: missing key '{}'", line_no, key));
  return *it;
}

std::string require_string(const nlohmann::json& obj, const char* key,
                           std::size_t line_no) {
  const auto& v = require(obj, key, line_no);
  if (!v.is_string())
    throw DataError(fmt::format("line {}: key '{}' must be a string", line_no, key));
  return v.get<std::string>();
}

// Structural parse only; semantic checks are left to the callers.
RawRecord parse_raw(std::string_view line, std::size_t line_no) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("line {}: malformed record: {}", line_no, e.what()));
  }
  if (!obj.is_object())
    throw DataError(fmt::format("line {}: record is not an object", line_no));

  RawRecord raw;
  auto& r = raw.record;
  r.id = require_string(obj, "id", line_no);
  if (r.id.empty()) throw DataError(fmt::format("line {}: empty id", line_no));
  r.cve_id = require_string(obj, "cve_id", line_no);
  r.code = require_string(obj, "code", line_no);
  r.description = require_string(obj, "description", line_no);

  if (auto it = obj.find("cvss_score"); it != obj.end() && !it->is_null()) {
    if (!it->is_number())
      throw DataError(fmt::format("line {}: cvss_score must be a number", line_no));
    raw.score = it->get<double>();
    r.cvss_score = *raw.score;
  }
  if (auto it = obj.find("severity"); it != obj.end() && !it->is_null()) {
    if (!it->is_string())
      throw DataError(fmt::format("line {}: severity must be a string", line_no));
    raw.stored = severity_from_name(it->get<std::string>());
    if (!raw.stored)
      throw DataError(fmt::format("line {}: unknown severity '{}'", line_no,
                                  it->get<std::string>()));
  }
  if (auto it = obj.find("collected_at"); it != obj.end() && !it->is_null()) {
    if (!it->is_string())
      throw DataError(fmt::format("line {}: collected_at must be a string", line_no));
    try {
      r.collected_at = CalendarDate::parse(it->get<std::string>());
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return raw;
}

double median(std::vector<std::size_t> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return static_cast<double>(values[mid]);
  return (static_cast<double>(values[mid - 1]) + static_cast<double>(values[mid])) / 2.0;
}

double mean(const std::vector<std::size_t>& values) {
  if (values.empty()) return 0.0;
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return sum / static_cast<double>(values.size());
}

std::string with_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::kCritical: return "Critical";
    case Severity::kHigh: return "High";
    case Severity::kMedium: return "Medium";
    case Severity::kLow: return "Low";
  }
  return "?";
}

std::optional<Severity> severity_from_name(std::string_view name) {
  for (Severity s : kSeverityTableOrder)
    if (iequals(name, to_string(s))) return s;
  return std::nullopt;
}

Severity severity_from_score(double score) {
  if (!(score >= 0.0 && score <= 10.0))
    throw RangeError(fmt::format("CVSS score {} outside [0, 10]", score));
  if (score < 0.1)
    throw NoSeverityError(fmt::format("CVSS score {} is in the None band", score));
  if (score >= 9.0) return Severity::kCritical;
  if (score >= 7.0) return Severity::kHigh;
  if (score >= 4.0) return Severity::kMedium;
  return Severity::kLow;
}

CalendarDate CalendarDate::parse(std::string_view text) {
  auto digits = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i])))
        throw DataError(fmt::format("invalid date '{}'", text));
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw DataError(fmt::format("invalid date '{}' (expected YYYY-MM-DD)", text));
  CalendarDate d{digits(0, 4), digits(5, 2), digits(8, 2)};
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
  if (d.month < 1 || d.month > 12) throw DataError(fmt::format("invalid date '{}'", text));
  const int max_day = kDays[d.month - 1] + (d.month == 2 && leap ? 1 : 0);
  if (d.day < 1 || d.day > max_day) throw DataError(fmt::format("invalid date '{}'", text));
  return d;
}

std::string CalendarDate::to_string() const {
  return fmt::format("{:04d}-{:02d}-{:02d}", year, month, day);
}

std::vector<VulnerabilityRecord> parse_dataset(std::string_view text) {
  std::vector<VulnerabilityRecord> out;
  std::unordered_set<std::string> seen;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    RawRecord raw = parse_raw(line, line_no);
    auto& r = raw.record;
    if (!raw.score)
      throw DataError(fmt::format("line {}: missing key 'cvss_score'", line_no));
    try {
      r.severity = severity_from_score(*raw.score);
    } catch (const NoSeverityError& e) {
      throw NoSeverityError(fmt::format("line {}: record '{}': {}", line_no, r.id, e.what()));
    } catch (const RangeError& e) {
      throw RangeError(fmt::format("line {}: record '{}': {}", line_no, r.id, e.what()));
    }
    if (raw.stored && *raw.stored != r.severity)
      throw DataError(fmt::format(
          "record '{}' (line {}): stored severity {} inconsistent with score {} ({})",
          r.id, line_no, to_string(*raw.stored), *raw.score, to_string(r.severity)));
    if (r.code.empty() || r.description.empty())
      throw DataError(fmt::format("record '{}' (line {}): empty code or description",
                                  r.id, line_no));
    if (!seen.insert(r.id).second)
      throw DataError(fmt::format("duplicate id '{}' (line {})", r.id, line_no));
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<VulnerabilityRecord> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

IngestResult ingest_dataset(std::string_view text) {
  IngestResult result;
  std::unordered_set<std::string> seen;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    RawRecord raw = parse_raw(line, line_no);
    auto& r = raw.record;
    if (!seen.insert(r.id).second)
      throw DataError(fmt::format("duplicate id '{}' (line {})", r.id, line_no));
    auto exclude = [&](std::string reason) {
      result.exclusions.push_back({line_no, r.id, std::move(reason)});
    };
    if (!raw.score) return exclude("no CVSS v3 score");
    try {
      r.severity = severity_from_score(*raw.score);
    } catch (const DataError& e) {
      return exclude(e.what());
    }
    if (raw.stored && *raw.stored != r.severity)
      return exclude(fmt::format("stored severity {} inconsistent with score {}",
                                 to_string(*raw.stored), *raw.score));
    if (r.code.empty()) return exclude("empty code");
    if (r.description.empty()) return exclude("empty description");
    result.records.push_back(std::move(r));
  });
  return result;
}

std::string serialize_record(const VulnerabilityRecord& r) {
  nlohmann::ordered_json obj;
  obj["id"] = r.id;
  obj["cve_id"] = r.cve_id;
  obj["code"] = r.code;
  obj["description"] = r.description;
  obj["cvss_score"] = r.cvss_score;
  obj["severity"] = std::string(to_string(r.severity));
  if (r.collected_at) obj["collected_at"] = r.collected_at->to_string();
  return obj.dump();
}

void save_dataset(const std::filesystem::path& path,
                  const std::vector<VulnerabilityRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : records) out << serialize_record(r) << '\n';
  if (!out) throw DataError(fmt::format("write failed for '{}'", path.string()));
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios) {
  constexpr double kSlack = 1e-9;
  const auto count = static_cast<double>(n);
  const auto test =
      std::min(n, static_cast<std::size_t>(std::floor(count * ratios.test + kSlack)));
  const std::size_t rest = n - test;
  const double head = ratios.train + ratios.validation;
  if (head <= 0.0) return {0, 0, n};

  const double train_quota = static_cast<double>(rest) * ratios.train / head;
  const double val_quota = static_cast<double>(rest) * ratios.validation / head;
  std::size_t train = static_cast<std::size_t>(std::floor(train_quota + kSlack));
  std::size_t val = static_cast<std::size_t>(std::floor(val_quota + kSlack));
  train = std::min(train, rest);
  val = std::min(val, rest - train);
  std::size_t leftover = rest - train - val;
  const double train_rem = train_quota - static_cast<double>(train);
  const double val_rem = val_quota - static_cast<double>(val);
  if (leftover > 0 && val_rem > train_rem) {
    ++val;
    --leftover;
  }
  // A second leftover can only come from floating-point slack.
  train += leftover;
  return {train, val, test};
}

CorpusSplit stratified_split(const std::vector<VulnerabilityRecord>& records,
                             const SplitRatios& ratios, std::uint64_t seed) {
  if (records.empty()) throw DataError("cannot split an empty corpus");
  const double parts[] = {ratios.train, ratios.validation, ratios.test};
  for (double p : parts)
    if (!(p >= 0.0 && p <= 1.0))
      throw UsageError(fmt::format("split ratio {} outside [0, 1]", p));
  if (std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
    throw UsageError("split ratios must sum to 1");

  CorpusSplit split;
  split.seed = seed;
  split.ratios = ratios;
  Rng rng(seed);
  for (Severity level : kSeverityTableOrder) {
    std::vector<const VulnerabilityRecord*> members;
    for (const auto& r : records)
      if (r.severity == level) members.push_back(&r);
    std::sort(members.begin(), members.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });
    seeded_shuffle(std::span(members), rng);
    const auto [n_train, n_val, n_test] = apportion(members.size(), ratios);
    std::size_t i = 0;
    for (; i < n_train; ++i) split.train.push_back(*members[i]);
    for (; i < n_train + n_val; ++i) split.validation.push_back(*members[i]);
    for (; i < n_train + n_val + n_test; ++i) split.test.push_back(*members[i]);
  }
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(split.train.begin(), split.train.end(), by_id);
  std::sort(split.validation.begin(), split.validation.end(), by_id);
  std::sort(split.test.begin(), split.test.end(), by_id);
  return split;
}

std::size_t count_whitespace_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

CorpusStats corpus_stats(const std::vector<VulnerabilityRecord>& records) {
  if (records.empty()) throw DataError("corpus statistics need at least one record");
  CorpusStats s;
  s.count = records.size();
  std::vector<std::size_t> code_tokens;
  std::vector<std::size_t> desc_tokens;
  code_tokens.reserve(records.size());
  desc_tokens.reserve(records.size());
  for (const auto& r : records) {
    ++s.per_class[index_of(r.severity)];
    code_tokens.push_back(count_whitespace_tokens(r.code));
    desc_tokens.push_back(count_whitespace_tokens(r.description));
  }
  s.mean_code_tokens = mean(code_tokens);
  s.median_code_tokens = median(code_tokens);
  s.mean_description_tokens = mean(desc_tokens);
  s.median_description_tokens = median(desc_tokens);
  return s;
}

std::string render_stats_table(
    const std::vector<std::pair<std::string, CorpusStats>>& columns) {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  auto add_row = [&](std::string label, auto&& cell) {
    std::vector<std::string> cells;
    for (const auto& [name, stats] : columns) cells.push_back(cell(stats));
    rows.emplace_back(std::move(label), std::move(cells));
  };
  add_row("Number", [](const CorpusStats& s) { return with_thousands(s.count); });
  for (Severity level : kSeverityTableOrder)
    add_row(fmt::format("Number of {} severity", to_string(level)),
            [level](const CorpusStats& s) { return with_thousands(s.per_class[index_of(level)]); });
  auto number = [](double v) { return fmt::format("{:.1f}", v); };
  add_row("Average tokens in codes",
          [&](const CorpusStats& s) { return number(s.mean_code_tokens); });
  add_row("Average tokens in descriptions",
          [&](const CorpusStats& s) { return number(s.mean_description_tokens); });
  add_row("Median tokens in codes",
          [&](const CorpusStats& s) { return number(s.median_code_tokens); });
  add_row("Median tokens in descriptions",
          [&](const CorpusStats& s) { return number(s.median_description_tokens); });

  std::size_t label_w = std::string_view("Statistic").size();
  for (const auto& [label, cells] : rows) label_w = std::max(label_w, label.size());
  std::vector<std::size_t> widths;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::size_t w = columns[c].first.size();
    for (const auto& [label, cells] : rows) w = std::max(w, cells[c].size());
    widths.push_back(w);
  }

  std::string out = fmt::format("{:<{}}", "Statistic", label_w);
  for (std::size_t c = 0; c < columns.size(); ++c)
    out += fmt::format("  {:>{}}", columns[c].first, widths[c]);
  out += '\n';
  for (const auto& [label, cells] : rows) {
    out += fmt::format("{:<{}}", label, label_w);
    for (std::size_t c = 0; c < cells.size(); ++c)
      out += fmt::format("  {:>{}}", cells[c], widths[c]);
    out += '\n';
  }
  return out;
}

}  // namespace svaicl
