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

// Little-endian encode/decode helpers for the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "svaicl/error.hpp"

namespace svaicl::detail {

template <typename UInt>
void put_le(std::string& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i)
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::string& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

/// Bounds-checked cursor; every short read throws FormatError.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string_view what) : bytes_(bytes), what_(what) {}

  template <typename UInt>
  UInt le() {
    need(sizeof(UInt));
    UInt v = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i)
      v |= static_cast<UInt>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(UInt);
    return v;
  }

  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n)
      throw FormatError(std::string(what_) + ": truncated payload at byte " + std::to_string(pos_));
  }

  std::string_view bytes_;
  std::string_view what_;
  std::size_t pos_ = 0;
};

}  // namespace svaicl::detail
