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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svaicl/corpus.hpp"
#include "svaicl/similarity.hpp"

namespace svaicl {

struct OrderingStrategy {
  enum class Kind { kSimilarity, kReverseSimilarity, kRandom };
  Kind kind = Kind::kSimilarity;
  std::uint64_t seed = 0;  // kRandom only

  static OrderingStrategy similarity() { return {Kind::kSimilarity, 0}; }
  static OrderingStrategy reverse() { return {Kind::kReverseSimilarity, 0}; }
  static OrderingStrategy random(std::uint64_t seed) { return {Kind::kRandom, seed}; }

  /// "similarity", "reverse" or "random".
  static std::optional<OrderingStrategy> parse(std::string_view name, std::uint64_t seed = 0);
  std::string_view name() const;
};

/// Similarity: ascending, so the most similar demo sits next to the test
/// block. ReverseSimilarity: descending. Random: seeded permutation.
/// Rank order is fused desc, sem_dist asc, id asc.
std::vector<Demonstration> order_demos(std::vector<Demonstration> demos,
                                       const OrderingStrategy& strategy);

/// ceil(bytes / 4).
std::size_t estimate_tokens(std::string_view text);

inline constexpr std::size_t kDefaultTokenBudget = 32000;
inline constexpr std::string_view kTruncationMarker = "...";

std::string_view default_instruction();

struct PromptOptions {
  std::string instruction{default_instruction()};
  std::size_t budget = kDefaultTokenBudget;
};

struct PromptBundle {
  std::string system_instruction;
  std::vector<std::string> demo_blocks;
  std::string test_block;
  std::string full_text;  // instruction + demo blocks + test block
  std::size_t token_estimate = 0;
  bool truncated = false;
};

/// Renders the instruction, one block per demo ("Demo i:", "[Input]:",
/// "Code:", "Description:", "[Output]: <label>") and the test block
/// ("Test 1:" ... "[Output]:" with nothing after it).
///
/// When the estimate exceeds the budget, fields are tail-truncated with
/// kTruncationMarker: demo code first (longest first, by a shared length cap),
/// then demo descriptions, then the test code. The instruction, labels and
/// test description are never touched. Throws UsageError when the budget
/// cannot be met.
PromptBundle build_prompt(const std::vector<Demonstration>& demos,
                          const VulnerabilityRecord& target, const PromptOptions& options);

}  // namespace svaicl
