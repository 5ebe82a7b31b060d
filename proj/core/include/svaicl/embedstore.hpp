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
#include <unordered_map>
#include <vector>

namespace svaicl {

enum class VectorKind { kCode, kDescription };

std::string_view to_string(VectorKind kind);

/// Embedding vectors keyed by record id, all of one dimension.
///
/// On disk (VEC1, little-endian):
///   "VEC1" | dim u32 | count u64 | count x (id_len u16 | id bytes | dim x f32)
class VectorStore {
 public:
  VectorStore(VectorKind kind, std::uint32_t dim);

  VectorKind kind() const noexcept { return kind_; }
  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }

  /// Throws DataError on a length mismatch, duplicate id, or id over 65535 bytes.
  void add(std::string id, std::span<const float> values);

  bool contains(std::string_view id) const;
  std::optional<std::span<const float>> find(std::string_view id) const;
  /// Throws MissingEmbedding naming the id.
  std::span<const float> at(std::string_view id) const;

  /// Insertion order, which is also file order.
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const float> row(std::size_t index) const;

 private:
  VectorKind kind_;
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Throws FormatError on a bad magic, truncated payload, trailing bytes,
/// zero dimension or duplicate id.
VectorStore load_vectors(const std::filesystem::path& path, VectorKind kind);
VectorStore decode_vectors(std::string_view bytes, VectorKind kind);

void save_vectors(const std::filesystem::path& path, const VectorStore& store);
std::string encode_vectors(const VectorStore& store);

}  // namespace svaicl
