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

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "svaicl/similarity.hpp"
#include "svaicl/whitening.hpp"

using namespace svaicl;

namespace {

std::vector<std::string> random_kinds(std::size_t n, std::mt19937_64& rng) {
  static const char* kinds[] = {"identifier", "call_expression", "if_statement", "return_statement",
                                "number_literal", "binary_expression", "compound_statement"};
  std::uniform_int_distribution<std::size_t> pick(0, 6);
  std::vector<std::string> out(n);
  for (auto& s : out) s = kinds[pick(rng)];
  return out;
}

void BM_Levenshtein(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_kinds(n, rng);
  const auto b = random_kinds(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(levenshtein(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Levenshtein)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_SemanticScan(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const std::size_t dim = 256;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<VulnerabilityRecord> records(count);
  std::vector<RecordProfile> profiles(count);
  for (std::size_t i = 0; i < count; ++i) {
    records[i].id = "V" + std::to_string(i);
    profiles[i].code_whitened.resize(dim);
    for (auto& v : profiles[i].code_whitened) v = normal(rng);
  }
  const HistoricalRepository repo(records, profiles);
  RecordProfile target;
  target.code_whitened.resize(dim);
  for (auto& v : target.code_whitened) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(semantic_candidates(target, "query", repo, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SemanticScan)->Arg(1000)->Arg(10000);

void BM_WhiteningFit(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::size_t n = 2000;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> x(n * dim);
  for (auto& v : x) v = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit_whitening(x, dim, dim / 2));
}
BENCHMARK(BM_WhiteningFit)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
