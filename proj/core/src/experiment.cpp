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

#include "svaicl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "svaicl/error.hpp"
#include "svaicl/random.hpp"
#include "table.hpp"

namespace svaicl {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw UsageError(fmt::format("run spec: '{}' must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError(fmt::format("run spec: unknown key '{}' in {}", key, where));
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(fmt::format("run spec: key '{}' has the wrong type", key));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError(fmt::format("cannot write '{}'", path.string()));
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw DataError(fmt::format("write failed for '{}'", path.string()));
}

ViewProvider views_for(GrammarChoice grammar) {
  auto parser = std::make_shared<CodeParser>(grammar);
  return [parser](const VulnerabilityRecord& r) { return make_code_views(*parser, r.code); };
}

const std::vector<VulnerabilityRecord>& eval_records(const CorpusSplit& split, std::string_view name) {
  if (name == "test") return split.test;
  if (name == "validation") return split.validation;
  throw UsageError(fmt::format("eval_split must be 'test' or 'validation', got '{}'", name));
}

// Rounds away binary noise from range arithmetic (0.1 * 3 -> 0.3).
double tidy(double v) { return std::round(v * 1e10) / 1e10; }

double parse_double(const std::string& axis, const std::string& value) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !std::isfinite(v))
    throw UsageError(fmt::format("grid axis '{}': '{}' is not a number", axis, value));
  return v;
}

std::size_t parse_count(const std::string& axis, const std::string& value) {
  const double v = parse_double(axis, value);
  if (v < 0 || v != std::floor(v) || v > 1e9)
    throw UsageError(fmt::format("grid axis '{}': '{}' is not a non-negative integer", axis, value));
  return static_cast<std::size_t>(v);
}

std::string percent_label(double share) { return fmt::format("{:g}%", tidy(share * 100.0)); }

}  // namespace

std::optional<SelectionMode> parse_selection_mode(std::string_view name) {
  if (name == "relevance") return SelectionMode::kRelevance;
  if (name == "random") return SelectionMode::kRandom;
  return std::nullopt;
}

std::string_view to_string(SelectionMode mode) {
  return mode == SelectionMode::kRelevance ? "relevance" : "random";
}

std::optional<GrammarChoice> parse_grammar_choice(std::string_view name) {
  if (name == "auto") return GrammarChoice::kAuto;
  if (name == "c") return GrammarChoice::kC;
  if (name == "cpp" || name == "c++") return GrammarChoice::kCpp;
  return std::nullopt;
}

RunMetadata RunSettings::metadata(std::string model) const {
  RunMetadata m;
  m.lambda = selection.lambda;
  m.phi = selection.phi;
  m.top_n = selection.top_n;
  m.shots = selection.shots;
  m.ordering = std::string(ordering.name());
  m.selection = std::string(to_string(mode));
  m.seed = seed;
  m.model = std::move(model);
  return m;
}

RunSpec parse_run_spec(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(fmt::format("run spec is not valid JSON: {}", e.what()));
  }
  check_keys(doc, "run spec",
             {"dataset", "code_vectors", "description_vectors", "whitening", "split", "eval_split",
              "date_cutoff", "grammar", "selection", "ordering", "seed", "budget", "instruction",
              "provider", "cache_dir", "out", "workers"});
  RunSpec spec;
  for (const char* key : {"dataset", "code_vectors", "description_vectors"})
    if (!doc.contains(key)) throw UsageError(fmt::format("run spec: missing required key '{}'", key));
  std::string path;
  read(doc, "dataset", path);
  spec.dataset = resolve(base_dir, path);
  read(doc, "code_vectors", path);
  spec.code_vectors = resolve(base_dir, path);
  read(doc, "description_vectors", path);
  spec.description_vectors = resolve(base_dir, path);

  if (doc.contains("whitening")) {
    const auto& w = doc["whitening"];
    check_keys(w, "whitening", {"dim", "model"});
    read(w, "dim", spec.whitening_dim);
    if (w.contains("model")) {
      read(w, "model", path);
      spec.whitening_model = resolve(base_dir, path);
    }
  }
  if (doc.contains("split")) {
    const auto& s = doc["split"];
    check_keys(s, "split", {"seed", "train", "validation", "test"});
    read(s, "seed", spec.split_seed);
    read(s, "train", spec.ratios.train);
    read(s, "validation", spec.ratios.validation);
    read(s, "test", spec.ratios.test);
  }
  read(doc, "eval_split", spec.eval_split);
  if (spec.eval_split != "test" && spec.eval_split != "validation")
    throw UsageError(fmt::format("run spec: eval_split must be 'test' or 'validation'"));
  if (doc.contains("date_cutoff")) {
    std::string date;
    read(doc, "date_cutoff", date);
    try {
      spec.date_cutoff = CalendarDate::parse(date);
    } catch (const DataError& e) {
      throw UsageError(fmt::format("run spec: date_cutoff: {}", e.what()));
    }
  }
  if (doc.contains("grammar")) {
    std::string g;
    read(doc, "grammar", g);
    auto choice = parse_grammar_choice(g);
    if (!choice) throw UsageError(fmt::format("run spec: unknown grammar '{}'", g));
    spec.grammar = *choice;
  }
  if (doc.contains("selection")) {
    const auto& s = doc["selection"];
    check_keys(s, "selection", {"mode", "top_n", "shots", "lambda", "phi"});
    if (s.contains("mode")) {
      std::string m;
      read(s, "mode", m);
      auto mode = parse_selection_mode(m);
      if (!mode) throw UsageError(fmt::format("run spec: unknown selection mode '{}'", m));
      spec.settings.mode = *mode;
    }
    read(s, "top_n", spec.settings.selection.top_n);
    read(s, "shots", spec.settings.selection.shots);
    read(s, "lambda", spec.settings.selection.lambda);
    read(s, "phi", spec.settings.selection.phi);
  }
  if (doc.contains("ordering")) {
    std::string o;
    read(doc, "ordering", o);
    auto ordering = OrderingStrategy::parse(o);
    if (!ordering) throw UsageError(fmt::format("run spec: unknown ordering '{}'", o));
    spec.settings.ordering = *ordering;
  }
  read(doc, "seed", spec.settings.seed);
  read(doc, "budget", spec.settings.budget);
  read(doc, "instruction", spec.settings.instruction);
  if (doc.contains("provider")) {
    const auto& p = doc["provider"];
    check_keys(p, "provider",
               {"kind", "base_url", "model", "api_key_env", "temperature", "frequency_penalty",
                "presence_penalty", "timeout_ms", "max_retries", "max_concurrent_requests",
                "backoff_base_ms", "backoff_max_ms", "retry_invalid"});
    auto& c = spec.provider;
    read(p, "kind", c.kind);
    read(p, "base_url", c.base_url);
    read(p, "model", c.model);
    read(p, "api_key_env", c.api_key_env);
    read(p, "temperature", c.temperature);
    read(p, "frequency_penalty", c.frequency_penalty);
    read(p, "presence_penalty", c.presence_penalty);
    std::int64_t ms = 0;
    if (p.contains("timeout_ms")) {
      read(p, "timeout_ms", ms);
      c.timeout = std::chrono::milliseconds(ms);
    }
    if (p.contains("backoff_base_ms")) {
      read(p, "backoff_base_ms", ms);
      c.backoff_base = std::chrono::milliseconds(ms);
    }
    if (p.contains("backoff_max_ms")) {
      read(p, "backoff_max_ms", ms);
      c.backoff_max = std::chrono::milliseconds(ms);
    }
    read(p, "max_retries", c.max_retries);
    read(p, "max_concurrent_requests", c.max_concurrent_requests);
    read(p, "retry_invalid", c.retry_invalid);
  }
  if (doc.contains("cache_dir")) {
    read(doc, "cache_dir", path);
    spec.cache_dir = resolve(base_dir, path);
  }
  if (doc.contains("out")) {
    read(doc, "out", path);
    spec.out_dir = resolve(base_dir, path);
  }
  read(doc, "workers", spec.workers);
  spec.settings.selection.validate();
  return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError(fmt::format("cannot open run spec '{}'", path.string()));
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_run_spec(buf.str(), path.parent_path());
}

ExperimentContext ExperimentContext::prepare(const RunSpec& spec) {
  auto records = load_dataset(spec.dataset);
  const auto code = load_vectors(spec.code_vectors, VectorKind::kCode);
  const auto desc = load_vectors(spec.description_vectors, VectorKind::kDescription);
  auto split = stratified_split(records, spec.ratios, spec.split_seed);
  std::optional<WhiteningModel> model;
  if (spec.whitening_model) {
    model = load_whitening(*spec.whitening_model);
    if (model->source_dim() != code.dim())
      throw DataError(fmt::format("whitening model expects dimension {}, code vectors have {}",
                                  model->source_dim(), code.dim()));
  } else {
    std::vector<std::string> ids;
    for (const auto& r : split.train) ids.push_back(r.id);
    model = fit_whitening(code, ids, spec.whitening_dim);
  }
  return ExperimentContext(std::move(split), code, desc, std::move(*model), spec.eval_split,
                           spec.date_cutoff, spec.grammar);
}

ExperimentContext::ExperimentContext(CorpusSplit split, const VectorStore& code_vectors,
                                     const VectorStore& description_vectors, WhiteningModel model,
                                     std::string_view eval_split,
                                     std::optional<CalendarDate> date_cutoff, GrammarChoice grammar)
    : split_(std::move(split)),
      whitening_(std::move(model)),
      repository_(HistoricalRepository::build(split_.train, code_vectors, description_vectors,
                                              whitening_, views_for(grammar))),
      targets_({}, {}) {
  std::vector<VulnerabilityRecord> targets = eval_records(split_, eval_split);
  if (date_cutoff) {
    auto filtered = filter_by_date(targets, *date_cutoff);
    targets = std::move(filtered.records);
    undated_ = filtered.undated;
  }
  targets_ = HistoricalRepository::build(std::move(targets), code_vectors, description_vectors,
                                         whitening_, views_for(grammar));
}

PreparedInstance prepare_instance(const ExperimentContext& ctx, std::size_t target_index,
                                  const RunSettings& settings) {
  const auto& target = ctx.targets().record(target_index);
  const auto& profile = ctx.targets().profile(target_index);
  PreparedInstance p;
  p.ranked = settings.mode == SelectionMode::kRelevance
                 ? select_demonstrations(target, profile, ctx.repository(), settings.selection)
                 : select_random_demonstrations(target, profile, ctx.repository(),
                                                settings.selection, settings.seed);
  OrderingStrategy ordering = settings.ordering;
  if (ordering.kind == OrderingStrategy::Kind::kRandom)
    ordering.seed = derive_seed(settings.seed, "order:" + target.id);
  p.prompt = order_demos(p.ranked.demos, ordering);
  p.bundle = build_prompt(p.prompt, target, {settings.instruction, settings.budget});
  return p;
}

ExperimentResult run_experiment(const ExperimentContext& ctx, const RunSettings& settings,
                                Assessor& assessor, std::size_t workers) {
  settings.selection.validate();
  const auto& targets = ctx.targets();
  if (targets.size() == 0) throw DataError("no evaluation targets");

  std::vector<AssessmentJob> jobs;
  std::vector<InstanceRecord> log;
  jobs.reserve(targets.size());
  log.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& target = targets.record(i);
    auto prepared = prepare_instance(ctx, i, settings);
    AssessmentJob job;
    job.target_id = target.id;
    job.truth = target.severity;
    job.prompt = prepared.bundle.full_text;
    for (const auto& d : prepared.ranked.demos)
      job.hints.demos.push_back({d.record->severity, d.scores.fused});
    jobs.push_back(std::move(job));

    InstanceRecord rec;
    rec.target_id = target.id;
    rec.truth = target.severity;
    for (const auto& d : prepared.prompt) {
      rec.demo_ids.push_back(d.record->id);
      rec.fused.push_back(d.scores.fused);
    }
    rec.prompt_tokens = prepared.bundle.token_estimate;
    rec.truncated = prepared.bundle.truncated;
    log.push_back(std::move(rec));
  }

  ExperimentResult out;
  out.results = assessor.assess_all(jobs, workers);
  for (std::size_t i = 0; i < log.size(); ++i) {
    log[i].predicted = out.results[i].predicted;
    log[i].raw = out.results[i].raw;
    log[i].prompt_hash = out.results[i].prompt_hash;
  }
  out.metrics = compute_metrics(log);
  out.metrics.run = settings.metadata(assessor.config().effective_model());
  out.log = std::move(log);
  return out;
}

void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  write_file(dir / "report.json", metrics_json(result.metrics));
  write_file(dir / "report.md", render_metrics_text(result.metrics));
  write_file(dir / "instances.jsonl", render_instance_log(result.log));
  std::string telemetry;
  for (const auto& r : result.results) {
    nlohmann::ordered_json j;
    j["target_id"] = r.target_id;
    j["from_cache"] = r.from_cache;
    j["latency_ms"] = r.latency.count();
    j["retries"] = r.retries;
    telemetry += j.dump();
    telemetry += '\n';
  }
  write_file(dir / "telemetry.jsonl", telemetry);
}

GridAxis parse_grid_axis(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos || eq == 0 || eq + 1 == spec.size())
    throw UsageError(fmt::format("grid '{}': expected name=values", spec));
  GridAxis axis;
  axis.name = std::string(spec.substr(0, eq));
  const std::string values(spec.substr(eq + 1));
  if (values.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(values);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3)
      throw UsageError(fmt::format("grid '{}': a range is start:stop:step", spec));
    const double start = parse_double(axis.name, parts[0]);
    const double stop = parse_double(axis.name, parts[1]);
    const double step = parse_double(axis.name, parts[2]);
    if (step <= 0 || stop < start)
      throw UsageError(fmt::format("grid '{}': need step > 0 and stop >= start", spec));
    const auto steps = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    if (steps > 10000) throw UsageError(fmt::format("grid '{}': too many points", spec));
    for (std::size_t i = 0; i <= steps; ++i)
      axis.values.push_back(fmt::format("{:g}", tidy(start + static_cast<double>(i) * step)));
  } else {
    std::stringstream ss(values);
    for (std::string part; std::getline(ss, part, ',');) {
      if (part.empty()) throw UsageError(fmt::format("grid '{}': empty value", spec));
      axis.values.push_back(part);
    }
  }
  if (axis.values.empty()) throw UsageError(fmt::format("grid '{}' has no values", spec));
  RunSettings probe;
  for (const auto& v : axis.values) apply_axis_value(probe, axis.name, v);
  return axis;
}

void apply_axis_value(RunSettings& settings, const std::string& axis, const std::string& value) {
  if (axis == "phi" || axis == "lambda") {
    const double w = parse_double(axis, value);
    if (!(w >= 0.0 && w <= 1.0))
      throw UsageError(fmt::format("grid axis '{}': {} is outside [0, 1]", axis, value));
    (axis == "phi" ? settings.selection.phi : settings.selection.lambda) = w;
  } else if (axis == "shots") {
    settings.selection.shots = parse_count(axis, value);
  } else if (axis == "top_n") {
    settings.selection.top_n = parse_count(axis, value);
  } else if (axis == "ordering") {
    auto o = OrderingStrategy::parse(value);
    if (!o) throw UsageError(fmt::format("grid axis 'ordering': unknown value '{}'", value));
    settings.ordering = *o;
  } else if (axis == "selection") {
    auto m = parse_selection_mode(value);
    if (!m) throw UsageError(fmt::format("grid axis 'selection': unknown value '{}'", value));
    settings.mode = *m;
  } else {
    throw UsageError(fmt::format(
        "unknown grid axis '{}' (expected phi, lambda, shots, top_n, ordering, selection)", axis));
  }
}

std::vector<AblationCell> run_ablation(const ExperimentContext& ctx, const RunSettings& base,
                                       const std::vector<GridAxis>& axes, Assessor& assessor,
                                       std::size_t workers) {
  if (axes.empty()) throw UsageError("ablation grid is empty");
  std::set<std::string> seen;
  for (const auto& a : axes) {
    if (a.values.empty()) throw UsageError(fmt::format("grid axis '{}' has no values", a.name));
    if (!seen.insert(a.name).second)
      throw UsageError(fmt::format("grid axis '{}' given twice", a.name));
  }
  std::vector<AblationCell> cells;
  std::vector<std::size_t> pos(axes.size(), 0);
  while (true) {
    AblationCell cell;
    cell.settings = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      cell.coords.emplace_back(axes[a].name, axes[a].values[pos[a]]);
      apply_axis_value(cell.settings, axes[a].name, axes[a].values[pos[a]]);
    }
    try {
      cell.result = run_experiment(ctx, cell.settings, assessor, workers);
    } catch (const Error& e) {
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));

    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++pos[a] < axes[a].values.size()) break;
      pos[a] = 0;
      if (a == 0) return cells;
    }
  }
}

std::string shot_setting_label(std::size_t shots) {
  if (shots == 0) return "with zero-shot";
  if (shots == 1) return "with one-shot";
  return fmt::format("with {}-shot", shots);
}

namespace {

std::string ordering_label(const std::string& value) {
  const auto o = OrderingStrategy::parse(value);
  switch (o->kind) {
    case OrderingStrategy::Kind::kSimilarity: return "Similarity";
    case OrderingStrategy::Kind::kReverseSimilarity: return "Reverse Similarity";
    case OrderingStrategy::Kind::kRandom: return "Random";
  }
  return value;
}

}  // namespace

std::string render_ablation_table(const std::vector<AblationCell>& cells,
                                  const std::vector<GridAxis>& axes) {
  bool has_ordering = false;
  bool has_selection = false;
  for (const auto& a : axes) {
    has_ordering |= a.name == "ordering";
    has_selection |= a.name == "selection";
  }
  const bool both = has_ordering && has_selection;
  std::vector<std::string> header;
  for (const auto& a : axes) {
    if (a.name == "phi") {
      header.insert(header.end(), {"CodeSim", "TextSim"});
    } else if (a.name == "lambda") {
      header.insert(header.end(), {"SynSim", "LexSim"});
    } else if (a.name == "shots") {
      header.push_back("Setting");
    } else if (a.name == "top_n") {
      header.push_back("Top-n");
    } else if (a.name == "ordering") {
      header.push_back(both ? "Strategy (ordering)" : "Strategy");
    } else if (a.name == "selection") {
      header.push_back(both ? "Strategy (selection)" : "Strategy");
    }
  }
  header.insert(header.end(), {"Accuracy (%)", "F1-score (%)", "MCC (%)"});

  std::vector<std::vector<std::string>> rows;
  std::string errors;
  for (const auto& cell : cells) {
    std::vector<std::string> row;
    for (const auto& [name, value] : cell.coords) {
      if (name == "phi") {
        row.push_back(percent_label(cell.settings.selection.phi));
        row.push_back(percent_label(1.0 - cell.settings.selection.phi));
      } else if (name == "lambda") {
        row.push_back(percent_label(cell.settings.selection.lambda));
        row.push_back(percent_label(1.0 - cell.settings.selection.lambda));
      } else if (name == "shots") {
        row.push_back(shot_setting_label(cell.settings.selection.shots));
      } else if (name == "top_n") {
        row.push_back(std::to_string(cell.settings.selection.top_n));
      } else if (name == "ordering") {
        row.push_back(ordering_label(value));
      } else if (name == "selection") {
        row.push_back(cell.settings.mode == SelectionMode::kRelevance ? "Relevance-based"
                                                                       : "Random-based");
      }
    }
    if (cell.result) {
      const auto& m = cell.result->metrics;
      row.push_back(format_percent(m.accuracy));
      row.push_back(format_percent(m.macro_f1));
      row.push_back(format_percent(m.mcc));
    } else {
      row.insert(row.end(), {"error", "error", "error"});
      std::string where;
      for (const auto& [name, value] : cell.coords)
        where += fmt::format("{}{}={}", where.empty() ? "" : " ", name, value);
      errors += fmt::format("- {}: {}\n", where, cell.error);
    }
    rows.push_back(std::move(row));
  }
  std::string out = detail::markdown_table(header, rows);
  if (!errors.empty()) out += "\nFailed cells:\n" + errors;
  return out;
}

std::string ablation_csv(const std::vector<AblationCell>& cells, const std::vector<GridAxis>& axes) {
  std::string out;
  for (const auto& a : axes) out += a.name + ",";
  out += "instances,correct,invalid,accuracy,macro_f1,mcc,mcc_undefined,error\n";
  for (const auto& cell : cells) {
    for (const auto& [name, value] : cell.coords) out += value + ",";
    if (cell.result) {
      const auto& m = cell.result->metrics;
      out += fmt::format("{},{},{},{},{},{},{},\n", m.instances, m.correct, m.invalid, m.accuracy,
                         m.macro_f1, m.mcc, m.mcc_undefined ? "true" : "false");
    } else {
      std::string msg = cell.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out += fmt::format(",,,,,,,\"{}\"\n", msg);
    }
  }
  return out;
}

std::vector<ResplitRun> run_resplits(const RunSpec& spec, std::span<const std::uint64_t> seeds,
                                     Assessor& assessor) {
  if (seeds.empty()) throw UsageError("resplit needs at least one seed");
  std::vector<ExperimentContext> contexts;
  for (auto seed : seeds) {
    RunSpec s = spec;
    s.split_seed = seed;
    contexts.push_back(ExperimentContext::prepare(s));
  }
  std::vector<ResplitRun> runs;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    runs.push_back({seeds[i], run_experiment(contexts[i], spec.settings, assessor, spec.workers)});
  return runs;
}

std::string render_resplit_table(const std::vector<ResplitRun>& runs) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : runs) {
    const auto& m = r.result.metrics;
    rows.push_back({std::to_string(r.split_seed), std::to_string(m.instances),
                    format_percent(m.accuracy), format_percent(m.macro_f1), format_percent(m.mcc)});
  }
  return detail::markdown_table(
      {"Split seed", "Instances", "Accuracy (%)", "F1-score (%)", "MCC (%)"}, rows);
}

}  // namespace svaicl
