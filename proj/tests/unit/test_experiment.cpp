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

#include <doctest.h>

#include <algorithm>

#include "svaicl/error.hpp"
#include "svaicl/experiment.hpp"
#include "test_support.hpp"

using namespace svaicl;

namespace {

const ExperimentContext& fixture_context() {
  static const ExperimentContext ctx = ExperimentContext::prepare(load_run_spec(testing::fixture("e2e.json")));
  return ctx;
}

RunSettings fixture_settings() { return load_run_spec(testing::fixture("e2e.json")).settings; }

ExperimentResult run_with(const RunSettings& settings, const std::string& kind = "mock-copy-nearest") {
  ProviderConfig cfg;
  cfg.kind = kind;
  Assessor assessor(cfg, make_provider(cfg), std::nullopt);
  return run_experiment(fixture_context(), settings, assessor);
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("run spec parsing") {
  const auto spec = parse_run_spec(R"({
    "dataset": "data/c.jsonl", "code_vectors": "/abs/code.vec", "description_vectors": "d.vec",
    "whitening": {"dim": 32},
    "split": {"seed": 3, "train": 0.7, "validation": 0.15, "test": 0.15},
    "selection": {"mode": "random", "top_n": 8, "shots": 2, "lambda": 0.6, "phi": 0.5},
    "ordering": "reverse", "seed": 9, "budget": 16000, "date_cutoff": "2023-07-31",
    "provider": {"kind": "mock-fixed:Low", "max_retries": 1, "retry_invalid": true},
    "workers": 3, "eval_split": "validation"})",
                                   "/base");
  CHECK(spec.dataset == "/base/data/c.jsonl");
  CHECK(spec.code_vectors == "/abs/code.vec");
  CHECK(spec.whitening_dim == 32);
  CHECK(spec.split_seed == 3);
  CHECK(spec.ratios.train == 0.7);
  CHECK(spec.settings.mode == SelectionMode::kRandom);
  CHECK(spec.settings.selection.top_n == 8);
  CHECK(spec.settings.selection.shots == 2);
  CHECK(spec.settings.selection.lambda == 0.6);
  CHECK(spec.settings.ordering.kind == OrderingStrategy::Kind::kReverseSimilarity);
  CHECK(spec.settings.seed == 9);
  CHECK(spec.settings.budget == 16000);
  CHECK(spec.date_cutoff == CalendarDate{2023, 7, 31});
  CHECK(spec.provider.kind == "mock-fixed:Low");
  CHECK(spec.provider.max_retries == 1);
  CHECK(spec.provider.retry_invalid);
  CHECK(spec.workers == 3);
  CHECK(spec.eval_split == "validation");

  const std::string paths = R"("dataset": "a", "code_vectors": "b", "description_vectors": "c")";
  CHECK_THROWS_AS(parse_run_spec("{" + paths + R"(, "phi": 0.5})", "/"), UsageError);
  CHECK_THROWS_AS(parse_run_spec("{" + paths + R"(, "selection": {"shots": "four"}})", "/"), UsageError);
  CHECK_THROWS_AS(parse_run_spec("{" + paths + R"(, "ordering": "sideways"})", "/"), UsageError);
  CHECK_THROWS_AS(parse_run_spec(R"({"dataset": "a"})", "/"), UsageError);
  CHECK_THROWS_AS(parse_run_spec("[1,2]", "/"), UsageError);
  CHECK_NOTHROW(parse_run_spec("{" + paths + "}", "/"));
}

TEST_CASE("fixture context") {
  const auto& ctx = fixture_context();
  CHECK(ctx.split().train.size() == 31);
  CHECK(ctx.split().validation.size() == 5);
  CHECK(ctx.split().test.size() == 14);
  CHECK(ctx.repository().size() == 31);
  CHECK(ctx.targets().size() == 14);
  CHECK(ctx.whitening().target_dim() == 8);
  CHECK(ctx.whitening().source_dim() == 16);
}

TEST_CASE("missing inputs fail before any provider call") {
  auto spec = load_run_spec(testing::fixture("e2e.json"));
  spec.code_vectors = testing::fixture("absent.vec");
  CHECK_THROWS_AS(ExperimentContext::prepare(spec), DataError);

  testing::TempDir dir;
  VectorStore partial(VectorKind::kCode, 16);
  const auto full = load_vectors(testing::fixture("code50.vec"), VectorKind::kCode);
  for (std::size_t i = 1; i < full.size(); ++i) partial.add(full.ids()[i], full.row(i));
  save_vectors(dir / "partial.vec", partial);
  spec = load_run_spec(testing::fixture("e2e.json"));
  spec.code_vectors = dir / "partial.vec";
  CHECK_THROWS_WITH_AS(ExperimentContext::prepare(spec), doctest::Contains(full.ids()[0].c_str()),
                       MissingEmbedding);
}

TEST_CASE("copy-nearest run") {
  const auto result = run_with(fixture_settings());
  CHECK(result.metrics.instances == 14);
  CHECK(result.log.size() == 14);
  CHECK(std::is_sorted(result.log.begin(), result.log.end(),
                       [](const auto& a, const auto& b) { return a.target_id < b.target_id; }));
  for (const auto& rec : result.log) {
    CHECK(rec.demo_ids.size() == 4);
    CHECK(std::is_sorted(rec.fused.begin(), rec.fused.end()));
    CHECK(std::find(rec.demo_ids.begin(), rec.demo_ids.end(), rec.target_id) == rec.demo_ids.end());
    CHECK(rec.prompt_hash.size() == 64);
  }
  CHECK(result.metrics.run.phi == 0.7);
  CHECK(result.metrics.run.model == "mock-copy-nearest");
}

TEST_CASE("zero-shot with a fixed answer scores the share of that class") {
  auto settings = fixture_settings();
  settings.selection.shots = 0;
  const auto result = run_with(settings, "mock-fixed:High");
  std::size_t high = 0;
  for (const auto& r : fixture_context().split().test) high += r.severity == Severity::kHigh;
  CHECK(result.metrics.accuracy == doctest::Approx(static_cast<double>(high) / 14.0));
  for (const auto& rec : result.log) {
    CHECK(rec.demo_ids.empty());
    CHECK(rec.fused.empty());
  }
}

TEST_CASE("phi = 1 ranks by code similarity alone") {
  auto settings = fixture_settings();
  settings.selection.phi = 1.0;
  settings.selection.shots = settings.selection.top_n;
  const auto& ctx = fixture_context();
  for (std::size_t t = 0; t < ctx.targets().size(); ++t) {
    const auto prepared = prepare_instance(ctx, t, settings);
    auto demos = prepared.ranked.demos;
    std::sort(demos.begin(), demos.end(), [](const Demonstration& a, const Demonstration& b) {
      if (a.scores.code_sim != b.scores.code_sim) return a.scores.code_sim > b.scores.code_sim;
      if (a.scores.sem_dist != b.scores.sem_dist) return a.scores.sem_dist < b.scores.sem_dist;
      return a.record->id < b.record->id;
    });
    for (std::size_t i = 0; i < demos.size(); ++i)
      CHECK(demos[i].record->id == prepared.ranked.demos[i].record->id);
  }
}

TEST_CASE("ordering of a single demonstration is vacuous") {
  auto settings = fixture_settings();
  settings.selection.shots = 1;
  const auto a = run_with(settings);
  settings.ordering = OrderingStrategy::reverse();
  const auto b = run_with(settings);
  CHECK(a.metrics.accuracy == b.metrics.accuracy);
  CHECK(a.metrics.mcc == b.metrics.mcc);
  CHECK(render_instance_log(a.log) == render_instance_log(b.log));
}

TEST_CASE("random selection is reproducible") {
  auto settings = fixture_settings();
  settings.mode = SelectionMode::kRandom;
  const auto a = run_with(settings);
  const auto b = run_with(settings);
  CHECK(render_instance_log(a.log) == render_instance_log(b.log));
  settings.seed += 1;
  CHECK(render_instance_log(run_with(settings).log) != render_instance_log(a.log));
  CHECK(a.metrics.run.selection == "random");
}

TEST_CASE("date cutoff keeps later targets only") {
  auto spec = load_run_spec(testing::fixture("e2e.json"));
  spec.date_cutoff = CalendarDate{2023, 7, 31};
  const auto ctx = ExperimentContext::prepare(spec);
  std::size_t want = 0, undated = 0;
  for (const auto& r : ctx.split().test) {
    if (!r.collected_at) ++undated;
    else if (*r.collected_at > *spec.date_cutoff) ++want;
  }
  CHECK(ctx.targets().size() == want);
  CHECK(ctx.undated_targets() == undated);
  CHECK(ctx.repository().size() == 31);
}

TEST_CASE("outputs are deterministic") {
  const auto result = run_with(fixture_settings());
  testing::TempDir a, b;
  write_experiment_outputs(a.path(), result);
  write_experiment_outputs(b.path(), run_with(fixture_settings()));
  for (const char* f : {"report.json", "report.md", "instances.jsonl"})
    CHECK(testing::read_file(a / f) == testing::read_file(b / f));
  CHECK(std::filesystem::exists(a / "telemetry.jsonl"));
}

TEST_CASE("grid axes") {
  const auto phi = parse_grid_axis("phi=0:1:0.1");
  CHECK(phi.name == "phi");
  CHECK(phi.values == std::vector<std::string>{"0", "0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7",
                                               "0.8", "0.9", "1"});
  CHECK(parse_grid_axis("shots=0,1,4,5").values == std::vector<std::string>{"0", "1", "4", "5"});
  CHECK(parse_grid_axis("ordering=similarity,reverse,random").values.size() == 3);
  CHECK_THROWS_AS(parse_grid_axis("phi"), UsageError);
  CHECK_THROWS_AS(parse_grid_axis("gamma=1,2"), UsageError);
  CHECK_THROWS_AS(parse_grid_axis("phi=0:1:0"), UsageError);
  CHECK_THROWS_AS(parse_grid_axis("phi=0,2"), UsageError);
  CHECK_THROWS_AS(parse_grid_axis("shots=a"), UsageError);

  RunSettings s;
  apply_axis_value(s, "lambda", "0.25");
  CHECK(s.selection.lambda == 0.25);
  apply_axis_value(s, "selection", "random");
  CHECK(s.mode == SelectionMode::kRandom);
  CHECK(shot_setting_label(0) == "with zero-shot");
  CHECK(shot_setting_label(1) == "with one-shot");
  CHECK(shot_setting_label(4) == "with 4-shot");
}

TEST_CASE("ablation sweep") {
  ProviderConfig cfg;
  Assessor assessor(cfg, make_provider(cfg), std::nullopt);
  const std::vector<GridAxis> axes{parse_grid_axis("phi=0,0.5,1"), parse_grid_axis("shots=0,4,20")};
  const auto cells = run_ablation(fixture_context(), fixture_settings(), axes, assessor);
  REQUIRE(cells.size() == 9);
  CHECK(cells[0].coords == std::vector<std::pair<std::string, std::string>>{{"phi", "0"}, {"shots", "0"}});
  CHECK(cells[1].coords[1].second == "4");
  CHECK(cells[3].coords[0].second == "0.5");
  for (const auto& c : cells) {
    if (c.coords[1].second == "20") {
      CHECK_FALSE(c.result);
      CHECK_FALSE(c.error.empty());
    } else {
      CHECK(c.result);
    }
  }

  const auto phi1 = run_with([] {
    auto s = fixture_settings();
    s.selection.phi = 1.0;
    return s;
  }());
  CHECK(render_instance_log(cells[7].result->log) == render_instance_log(phi1.log));

  const auto table = render_ablation_table(cells, axes);
  CHECK(table.find("CodeSim") != std::string::npos);
  CHECK(table.find("Setting") != std::string::npos);
  CHECK(table.find("with zero-shot") != std::string::npos);
  CHECK(table.find("Failed cells") != std::string::npos);
  const auto csv = ablation_csv(cells, axes);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

  CHECK_THROWS_AS(run_ablation(fixture_context(), fixture_settings(), {}, assessor), UsageError);
  const std::vector<GridAxis> twice{parse_grid_axis("phi=0"), parse_grid_axis("phi=1")};
  CHECK_THROWS_AS(run_ablation(fixture_context(), fixture_settings(), twice, assessor), UsageError);
}

TEST_CASE("resplits") {
  ProviderConfig cfg;
  Assessor assessor(cfg, make_provider(cfg), std::nullopt);
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto runs = run_resplits(load_run_spec(testing::fixture("e2e.json")), seeds, assessor);
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].split_seed == 1);
  CHECK(runs[0].result.metrics.instances == 14);
  const auto table = render_resplit_table(runs);
  CHECK(table.find("Accuracy (%)") != std::string::npos);
}

}  // TEST_SUITE
