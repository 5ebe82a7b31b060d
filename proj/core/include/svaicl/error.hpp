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

#include <stdexcept>
#include <string>

namespace svaicl {

/// Broad failure classes. The CLI maps each one to a distinct exit status.
enum class ErrorKind {
  kUsage = 2,
  kData = 3,
  kProvider = 4,
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

/// Malformed, inconsistent or missing input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class RangeError : public DataError {
 public:
  using DataError::DataError;
};

/// CVSS v3 "None" band: a score in [0.0, 0.1) has no severity level.
class NoSeverityError : public DataError {
 public:
  using DataError::DataError;
};

/// Binary file did not match its declared layout.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// The syntax tree for a snippet contained error or missing nodes.
class ParseFailure : public DataError {
 public:
  using DataError::DataError;
};

class MissingEmbedding : public DataError {
 public:
  using DataError::DataError;
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what, int status = 0)
      : Error(ErrorKind::kProvider, what), status_(status) {}

  /// HTTP status when the provider answered, 0 otherwise.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Connection failure or timeout that survived every retry.
class TransportError : public ProviderError {
 public:
  explicit TransportError(const std::string& what) : ProviderError(what, 0) {}
};

/// A 2xx response whose body was not a chat completion.
class ProtocolError : public ProviderError {
 public:
  explicit ProtocolError(const std::string& what) : ProviderError(what, 0) {}
};

}  // namespace svaicl
