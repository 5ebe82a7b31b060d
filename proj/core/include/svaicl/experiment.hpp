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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svaicl/codeparse.hpp"
#include "svaicl/corpus.hpp"
#include "svaicl/embedstore.hpp"
#include "svaicl/evaluation.hpp"
#include "svaicl/llmclient.hpp"
#include "svaicl/prompting.hpp"
#include "svaicl/similarity.hpp"
#include "svaicl/whitening.hpp"

namespace svaicl {

enum class SelectionMode { kRelevance, kRandom };

/// "relevance" or "random".
std::optional<SelectionMode> parse_selection_mode(std::string_view name);
std::string_view to_string(SelectionMode mode);

/// Everything that varies between cells of an ablation.
struct RunSettings {
  SelectionParams selection;
  SelectionMode mode = SelectionMode::kRelevance;
  OrderingStrategy ordering;  // random ordering derives a per-target seed from `seed`
  std::uint64_t seed = 0;
  std::size_t budget = kDefaultTokenBudget;
  std::string instruction{default_instruction()};

  RunMetadata metadata(std::string model) const;
};

/// Run spec file (JSON). Relative paths resolve against the file's directory.
///
///   { "dataset": "corpus.jsonl",
///     "code_vectors": "code.vec", "description_vectors": "desc.vec",
///     "whitening": {"dim": 8, "model": "white.bin"},
///     "split": {"seed": 0, "train": 0.8, "validation": 0.1, "test": 0.1},
///     "eval_split": "test", "date_cutoff": "2023-07-31", "grammar": "auto",
///     "selection": {"mode": "relevance", "top_n": 10, "shots": 4,
///                   "lambda": 0.4, "phi": 0.7},
///     "ordering": "similarity", "seed": 0, "budget": 32000,
///     "provider": {"kind": "mock-copy-nearest", "base_url": "", "model": "",
///                  "api_key_env": "OPENAI_API_KEY", "temperature": 0,
///                  "frequency_penalty": 0, "presence_penalty": 0,
///                  "timeout_ms": 60000, "max_retries": 3,
///                  "max_concurrent_requests": 4, "retry_invalid": false},
///     "cache_dir": "cache", "out": "out", "workers": 1 }
///
/// Every key is optional except the three data paths.
struct RunSpec {
  std::filesystem::path dataset;
  std::filesystem::path code_vectors;
  std::filesystem::path description_vectors;
  std::optional<std::filesystem::path> whitening_model;
  std::size_t whitening_dim = kDefaultWhiteningDim;
  SplitRatios ratios;
  std::uint64_t split_seed = 0;
  std::string eval_split = "test";  // "test" or "validation"
  std::optional<CalendarDate> date_cutoff;
  GrammarChoice grammar = GrammarChoice::kAuto;
  RunSettings settings;
  ProviderConfig provider;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;
};

/// Throws UsageError on unknown keys or ill-typed values.
RunSpec parse_run_spec(std::string_view json_text, const std::filesystem::path& base_dir);
RunSpec load_run_spec(const std::filesystem::path& path);

std::optional<GrammarChoice> parse_grammar_choice(std::string_view name);

/// Loaded and validated inputs shared by every run over one split: the
/// train-split repository, the evaluation targets and the whitening model.
class ExperimentContext {
 public:
  /// Loads the dataset and stores, splits, fits whitening on the train split
  /// (unless a model is given) and profiles every record. All data errors
  /// surface here, before any provider call.
  static ExperimentContext prepare(const RunSpec& spec);

  ExperimentContext(CorpusSplit split, const VectorStore& code_vectors,
                    const VectorStore& description_vectors, WhiteningModel model,
                    std::string_view eval_split = "test",
                    std::optional<CalendarDate> date_cutoff = std::nullopt,
                    GrammarChoice grammar = GrammarChoice::kAuto);

  const CorpusSplit& split() const noexcept { return split_; }
  const WhiteningModel& whitening() const noexcept { return whitening_; }
  const HistoricalRepository& repository() const noexcept { return repository_; }
  const HistoricalRepository& targets() const noexcept { return targets_; }
  /// Targets dropped by the date cutoff for lacking a collection date.
  std::size_t undated_targets() const noexcept { return undated_; }

 private:
  CorpusSplit split_;
  WhiteningModel whitening_;
  HistoricalRepository repository_;
  HistoricalRepository targets_;
  std::size_t undated_ = 0;
};

/// Demonstrations for one target under the given settings, in prompt order.
struct PreparedInstance {
  DemonstrationSet ranked;            // best first
  std::vector<Demonstration> prompt;  // ordered for the prompt
  PromptBundle bundle;
};

PreparedInstance prepare_instance(const ExperimentContext& ctx, std::size_t target_index,
                                  const RunSettings& settings);

struct ExperimentResult {
  MetricsReport metrics;
  std::vector<InstanceRecord> log;         // sorted by target id
  std::vector<AssessmentResult> results;   // parallel to log
};

/// Selects, orders and renders every target's prompt, then assesses them all.
/// Prompts are fully built before the first provider call.
ExperimentResult run_experiment(const ExperimentContext& ctx, const RunSettings& settings,
                                Assessor& assessor, std::size_t workers = 1);

/// Writes report.json, report.md and instances.jsonl (deterministic) and
/// telemetry.jsonl (cache hits, latency, retries) into `dir`.
void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentResult& result);

// Ablation ------------------------------------------------------------------

/// One swept parameter: phi, lambda, shots, top_n, ordering or selection.
struct GridAxis {
  std::string name;
  std::vector<std::string> values;
};

/// "phi=0:1:0.1" (inclusive range) or "shots=0,1,4,5". Throws UsageError.
GridAxis parse_grid_axis(std::string_view spec);

/// Throws UsageError on an unknown axis or unparsable value.
void apply_axis_value(RunSettings& settings, const std::string& axis, const std::string& value);

struct AblationCell {
  std::vector<std::pair<std::string, std::string>> coords;
  RunSettings settings;
  std::optional<ExperimentResult> result;
  std::string error;  // set when the cell failed
};

/// Cartesian product of the axes, first axis outermost. A failing cell keeps
/// its error message and the sweep continues. Throws UsageError on an empty grid.
std::vector<AblationCell> run_ablation(const ExperimentContext& ctx, const RunSettings& base,
                                       const std::vector<GridAxis>& axes, Assessor& assessor,
                                       std::size_t workers = 1);

/// Markdown table with one row per cell: CodeSim/TextSim
/// for phi, SynSim/LexSim for lambda, Setting for shots, Strategy for
/// ordering and selection, then Accuracy (%), F1-score (%), MCC (%).
std::string render_ablation_table(const std::vector<AblationCell>& cells,
                                  const std::vector<GridAxis>& axes);
std::string ablation_csv(const std::vector<AblationCell>& cells, const std::vector<GridAxis>& axes);

/// "with zero-shot", "with one-shot", "with 4-shot".
std::string shot_setting_label(std::size_t shots);

// Resplits ------------------------------------------------------------------

struct ResplitRun {
  std::uint64_t split_seed = 0;
  ExperimentResult result;
};

/// Repeats run_experiment on fresh splits, one per seed.
std::vector<ResplitRun> run_resplits(const RunSpec& spec, std::span<const std::uint64_t> seeds,
                                     Assessor& assessor);
std::string render_resplit_table(const std::vector<ResplitRun>& runs);

}  // namespace svaicl
