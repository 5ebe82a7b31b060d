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

#include "svaicl/prompting.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "svaicl/error.hpp"
#include "svaicl/random.hpp"

namespace svaicl {

namespace {

constexpr std::size_t kNoCap = std::numeric_limits<std::size_t>::max();

// Longest prefix of at most `cap` bytes that does not split a UTF-8 sequence.
std::size_t utf8_prefix_len(std::string_view s, std::size_t cap) {
  if (cap >= s.size()) return s.size();
  std::size_t len = cap;
  while (len > 0 && (static_cast<unsigned char>(s[len]) & 0xC0) == 0x80) --len;
  return len;
}

struct Field {
  std::string_view original;
  std::size_t cap = kNoCap;

  bool cut_at(std::size_t c) const {
    return c != kNoCap && original.size() > c + kTruncationMarker.size();
  }
  std::size_t rendered_len(std::size_t c) const {
    return cut_at(c) ? utf8_prefix_len(original, c) + kTruncationMarker.size() : original.size();
  }
  std::size_t rendered_len() const { return rendered_len(cap); }
  std::string render() const {
    if (!cut_at(cap)) return std::string(original);
    std::string out(original.substr(0, utf8_prefix_len(original, cap)));
    out += kTruncationMarker;
    return out;
  }
};

std::string render_demo(std::size_t index, const std::string& code, const std::string& description,
                        Severity label) {
  return fmt::format("Demo {}:\n[Input]:\nCode:\n{}\nDescription: {}\n[Output]: {}\n\n", index,
                     code, description, to_string(label));
}

std::string render_test(const std::string& code, std::string_view description) {
  return fmt::format("Test 1:\n[Input]:\nCode:\n{}\nDescription: {}\n[Output]:", code,
                     description);
}

// Lowers a shared cap over `group` until the whole prompt fits in `limit`
// bytes, or to zero when even that is not enough. Returns the new total.
std::size_t fit_group(std::vector<Field*>& group, std::size_t total, std::size_t limit) {
  if (group.empty() || total <= limit) return total;
  std::size_t group_now = 0;
  std::size_t longest = 0;
  for (const Field* f : group) {
    group_now += f->rendered_len();
    longest = std::max(longest, f->original.size());
  }
  const std::size_t others = total - group_now;
  auto group_len = [&](std::size_t cap) {
    std::size_t sum = 0;
    for (const Field* f : group) sum += f->rendered_len(std::min(cap, f->cap));
    return sum;
  };
  std::size_t best = 0;
  if (others < limit) {
    const std::size_t allowed = limit - others;
    std::size_t lo = 0;
    std::size_t hi = longest;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo + 1) / 2;
      if (group_len(mid) <= allowed) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    best = lo;
  }
  for (Field* f : group) f->cap = std::min(best, f->cap);
  return others + group_len(best);
}

}  // namespace

std::optional<OrderingStrategy> OrderingStrategy::parse(std::string_view name, std::uint64_t seed) {
  if (name == "similarity") return similarity();
  if (name == "reverse" || name == "reverse-similarity") return reverse();
  if (name == "random") return random(seed);
  return std::nullopt;
}

std::string_view OrderingStrategy::name() const {
  switch (kind) {
    case Kind::kSimilarity: return "similarity";
    case Kind::kReverseSimilarity: return "reverse";
    case Kind::kRandom: return "random";
  }
  return "?";
}

std::vector<Demonstration> order_demos(std::vector<Demonstration> demos,
                                       const OrderingStrategy& strategy) {
  std::sort(demos.begin(), demos.end(), [](const Demonstration& a, const Demonstration& b) {
    return ranks_before(a.scores, b.scores);
  });
  switch (strategy.kind) {
    case OrderingStrategy::Kind::kSimilarity:
      std::reverse(demos.begin(), demos.end());
      break;
    case OrderingStrategy::Kind::kReverseSimilarity:
      break;
    case OrderingStrategy::Kind::kRandom: {
      Rng rng(strategy.seed);
      seeded_shuffle(std::span(demos), rng);
      break;
    }
  }
  return demos;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string_view default_instruction() {
  return "You are a software security analyst. Assess the CVSS v3 base severity of the test "
         "vulnerability from its source code and vulnerability description. The base severity is "
         "one of Critical, High, Medium or Low. The demonstrations below show vulnerabilities "
         "with their base severity. Output only the base severity of the test vulnerability, "
         "without any additional explanation.\n\n";
}

PromptBundle build_prompt(const std::vector<Demonstration>& demos,
                          const VulnerabilityRecord& target, const PromptOptions& options) {
  if (options.budget == 0) throw UsageError("token budget must be positive");

  std::vector<Field> demo_code(demos.size());
  std::vector<Field> demo_desc(demos.size());
  for (std::size_t i = 0; i < demos.size(); ++i) {
    demo_code[i].original = demos[i].record->code;
    demo_desc[i].original = demos[i].record->description;
  }
  Field test_code{target.code};

  auto render_all = [&](PromptBundle& b) {
    b.system_instruction = options.instruction;
    b.demo_blocks.clear();
    for (std::size_t i = 0; i < demos.size(); ++i)
      b.demo_blocks.push_back(render_demo(i + 1, demo_code[i].render(), demo_desc[i].render(),
                                          demos[i].record->severity));
    b.test_block = render_test(test_code.render(), target.description);
    b.full_text = b.system_instruction;
    for (const auto& block : b.demo_blocks) b.full_text += block;
    b.full_text += b.test_block;
    b.token_estimate = estimate_tokens(b.full_text);
  };

  PromptBundle bundle;
  render_all(bundle);
  const std::size_t limit = options.budget * 4;
  if (bundle.full_text.size() <= limit) return bundle;

  std::size_t total = bundle.full_text.size();
  std::vector<Field*> codes;
  std::vector<Field*> descs;
  for (auto& f : demo_code) codes.push_back(&f);
  for (auto& f : demo_desc) descs.push_back(&f);
  std::vector<Field*> tests{&test_code};
  total = fit_group(codes, total, limit);
  total = fit_group(descs, total, limit);
  total = fit_group(tests, total, limit);

  render_all(bundle);
  bundle.truncated = true;
  if (bundle.token_estimate > options.budget)
    throw UsageError(fmt::format(
        "token budget {} cannot hold the prompt skeleton ({} tokens after full truncation)",
        options.budget, bundle.token_estimate));
  return bundle;
}

}  // namespace svaicl
