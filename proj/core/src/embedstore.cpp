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

#include "svaicl/embedstore.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "bytes.hpp"
#include "svaicl/error.hpp"

namespace svaicl {

namespace {

constexpr std::string_view kMagic = "VEC1";

}  // namespace

std::string_view to_string(VectorKind kind) {
  return kind == VectorKind::kCode ? "code" : "description";
}

VectorStore::VectorStore(VectorKind kind, std::uint32_t dim) : kind_(kind), dim_(dim) {
  if (dim == 0) throw DataError("vector dimension must be positive");
}

void VectorStore::add(std::string id, std::span<const float> values) {
  if (values.size() != dim_)
    throw DataError(fmt::format("vector for '{}' has length {}, store dimension is {}", id,
                                values.size(), dim_));
  if (id.size() > std::numeric_limits<std::uint16_t>::max())
    throw DataError("vector id longer than 65535 bytes");
  if (!index_.emplace(id, ids_.size()).second)
    throw DataError(fmt::format("duplicate vector id '{}'", id));
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
}

bool VectorStore::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

std::optional<std::span<const float>> VectorStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return row(it->second);
}

std::span<const float> VectorStore::at(std::string_view id) const {
  if (auto v = find(id)) return *v;
  throw MissingEmbedding(fmt::format("no {} embedding for record '{}'", to_string(kind_), id));
}

std::span<const float> VectorStore::row(std::size_t index) const {
  return std::span<const float>(data_).subspan(index * dim_, dim_);
}

VectorStore decode_vectors(std::string_view bytes, VectorKind kind) {
  detail::ByteReader in(bytes, "vector file");
  if (in.take(kMagic.size()) != kMagic) throw FormatError("vector file: bad magic (expected VEC1)");
  const auto dim = in.le<std::uint32_t>();
  const auto count = in.le<std::uint64_t>();
  if (dim == 0) throw FormatError("vector file: dimension is zero");
  // Each entry needs at least 2 + 4*dim bytes.
  if (count > in.remaining() / (2 + 4ULL * dim))
    throw FormatError(fmt::format("vector file: truncated payload, header count {} exceeds data",
                                  count));

  VectorStore store(kind, dim);
  std::vector<float> values(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto id_len = in.le<std::uint16_t>();
    std::string id(in.take(id_len));
    for (auto& v : values) v = in.f32();
    try {
      store.add(std::move(id), values);
    } catch (const DataError& e) {
      throw FormatError(fmt::format("vector file entry {}: {}", i, e.what()));
    }
  }
  if (in.remaining() != 0)
    throw FormatError(fmt::format("vector file: {} trailing bytes after {} entries (dim {})",
                                  in.remaining(), count, dim));
  return store;
}

VectorStore load_vectors(const std::filesystem::path& path, VectorKind kind) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError(fmt::format("cannot open vector file '{}'", path.string()));
  std::ostringstream buf;
  buf << f.rdbuf();
  try {
    return decode_vectors(buf.str(), kind);
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string encode_vectors(const VectorStore& store) {
  std::string out(kMagic);
  detail::put_le<std::uint32_t>(out, store.dim());
  detail::put_le<std::uint64_t>(out, store.size());
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& id = store.ids()[i];
    detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(id.size()));
    out += id;
    for (float v : store.row(i)) detail::put_f32(out, v);
  }
  return out;
}

void save_vectors(const std::filesystem::path& path, const VectorStore& store) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError(fmt::format("cannot write vector file '{}'", path.string()));
  const std::string bytes = encode_vectors(store);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace svaicl
