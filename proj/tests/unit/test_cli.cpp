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

#include <sstream>

#include "cli.hpp"
#include "svaicl/error.hpp"
#include "test_support.hpp"

using namespace svaicl;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string config() { return testing::fixture("e2e.json").string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("argument parsing") {
  const auto cmd = cli::parse_args({"--config", "x.json", "--phi", "0.5", "--shots", "2", "evaluate",
                                    "--resplit-seeds", "1,2"});
  CHECK(cmd.verb == "evaluate");
  CHECK(cmd.config == std::filesystem::path("x.json"));
  CHECK(cmd.phi == 0.5);
  CHECK(cmd.shots == 2u);
  CHECK(cmd.resplit_seeds == std::vector<std::uint64_t>{1, 2});
  CHECK_FALSE(cmd.lambda);

  const auto after = cli::parse_args({"ablate", "--config", "x.json", "--grid", "phi=0:1:0.5", "--grid",
                                      "shots=0,4"});
  REQUIRE(after.grid.size() == 2);
  CHECK(after.grid[0].values.size() == 3);

  const auto buckets = cli::parse_args({"buckets", "--log", "l.jsonl", "--bounds", "0.3,0.6"});
  CHECK(buckets.bounds == std::vector<double>{0.3, 0.6});

  CHECK_THROWS_WITH_AS(cli::parse_args({"frobnicate"}), doctest::Contains("frobnicate"), UsageError);
  CHECK_THROWS_WITH_AS(cli::parse_args({"ablate", "--config", "x.json"}), doctest::Contains("--grid"),
                       UsageError);
  CHECK_THROWS_WITH_AS(cli::parse_args({"retrieve", "--config", "x.json"}), doctest::Contains("--target"),
                       UsageError);
  CHECK_THROWS_AS(cli::parse_args({"evaluate", "--config", "x", "--shots", "many"}), UsageError);
  CHECK_THROWS_AS(cli::parse_args({"evaluate"}), UsageError);
  CHECK_THROWS_AS(cli::parse_args({"--help"}), cli::HelpRequested);
}

TEST_CASE("flags override the config file") {
  auto cmd = cli::parse_args({"--config", config(), "--phi", "0.2", "--provider", "mock-fixed:Low",
                              "--top-n", "6", "evaluate"});
  const auto spec = cli::resolve_run_spec(cmd);
  CHECK(spec.settings.selection.phi == 0.2);
  CHECK(spec.settings.selection.lambda == 0.4);
  CHECK(spec.settings.selection.top_n == 6);
  CHECK(spec.provider.kind == "mock-fixed:Low");
  CHECK(spec.whitening_dim == 8);
}

TEST_CASE("exit statuses") {
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({}).status == 2);
  CHECK(run({"--help"}).status == 0);
  CHECK(run({"evaluate", "--config", "/nonexistent/spec.json"}).status != 0);
  testing::TempDir dir;
  testing::write_file(dir / "bad.jsonl", "{nope\n");
  CHECK(run({"stats", "--dataset", (dir / "bad.jsonl").string()}).status == 3);
  CHECK(run({"evaluate", "--config", config(), "--shots", "30", "--out", (dir / "o").string()}).status == 2);
}

TEST_CASE("ingest") {
  testing::TempDir dir;
  const auto r = run({"ingest", "--input", testing::fixture("raw_ingest.jsonl").string(), "--out",
                      dir.path().string()});
  CHECK(r.status == 0);
  CHECK(load_dataset(dir / "dataset.jsonl").size() == 6);
  const auto exclusions = testing::read_file(dir / "exclusions.jsonl");
  CHECK(std::count(exclusions.begin(), exclusions.end(), '\n') == 4);
}

TEST_CASE("stats and split") {
  testing::TempDir dir;
  const auto stats = run({"stats", "--dataset", testing::fixture("corpus50.jsonl").string()});
  CHECK(stats.status == 0);
  CHECK(stats.out.find("Number of Critical severity") != std::string::npos);
  const auto split = run({"split", "--dataset", testing::fixture("corpus50.jsonl").string(), "--out",
                          dir.path().string()});
  CHECK(split.status == 0);
  const auto total = load_dataset(dir / "train.jsonl").size() + load_dataset(dir / "validation.jsonl").size() +
                     load_dataset(dir / "test.jsonl").size();
  CHECK(total == 50);
}

TEST_CASE("retrieve and prompt") {
  const auto& target = "SVA-0003";
  const auto r = run({"--config", config(), "retrieve", "--target", target});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("*") != std::string::npos);
  const auto p = run({"--config", config(), "prompt", "--target", target});
  REQUIRE(p.status == 0);
  CHECK(p.out.find("Demo 4:") != std::string::npos);
  CHECK(p.out.find("Test 1:") != std::string::npos);
  CHECK(run({"--config", config(), "prompt", "--target", "SVA-9999"}).status == 3);
}

TEST_CASE("evaluate, then buckets on its log") {
  testing::TempDir dir;
  const auto out = (dir / "run").string();
  const auto e = run({"--config", config(), "--out", out, "--cache-dir", (dir / "cache").string(), "evaluate"});
  REQUIRE(e.status == 0);
  for (const char* f : {"report.json", "report.md", "instances.jsonl", "telemetry.jsonl"})
    CHECK(std::filesystem::exists(dir / "run" / f));
  const auto b = run({"buckets", "--log", (dir / "run" / "instances.jsonl").string(), "--out", out});
  CHECK(b.status == 0);
  CHECK(b.out.find("[0.5, 1]") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "run" / "buckets.json"));
}

TEST_CASE("whiten and index") {
  testing::TempDir dir;
  CHECK(run({"whiten", "--vectors", testing::fixture("code50.vec").string(), "--dim", "4", "--out",
             dir.path().string()})
            .status == 0);
  CHECK(load_whitening(dir / "whitening.wht").target_dim() == 4);
  CHECK(run({"--config", config(), "--out", (dir / "i").string(), "index"}).status == 0);
  CHECK(std::filesystem::exists(dir / "i" / "index.json"));
}

}  // TEST_SUITE
