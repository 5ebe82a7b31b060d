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

// Seeded randomness used by splits, random demo ordering and the random
// selection baseline. Every draw goes through std::mt19937_64, whose output
// sequence is fixed by the C++ standard, and through the bounded-draw and
// shuffle routines below (std::shuffle and the std distributions are
// implementation-defined, so they are never used).
//
//   uniform_below(b): draw r until r >= (2^64 - b) mod b, return r mod b
//   shuffle:          Fisher-Yates from the back, j = uniform_below(i + 1)

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace svaicl {

using Rng = std::mt19937_64;

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

template <typename T>
void seeded_shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent per-item seed (splitmix64 finalizer over seed ^ fnv1a(tag)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t z = seed ^ fnv1a64(tag);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace svaicl
