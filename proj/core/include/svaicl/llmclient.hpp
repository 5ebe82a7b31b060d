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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svaicl/corpus.hpp"
#include "svaicl/prompting.hpp"

namespace svaicl {

struct ProviderConfig {
  /// "mock-copy-nearest", "mock-fixed:<answer>" or "openai" (live HTTP).
  std::string kind = "mock-copy-nearest";
  std::string base_url;
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  std::chrono::milliseconds timeout{60000};
  std::size_t max_retries = 3;
  std::size_t max_concurrent_requests = 4;
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds backoff_max{30000};
  /// Re-ask once, bypassing the cache, when the answer parses as Invalid.
  bool retry_invalid = false;

  bool is_mock() const { return kind.rfind("mock-", 0) == 0; }
  /// Model name used on the wire and in the cache key; mocks use their kind.
  std::string effective_model() const { return is_mock() ? kind : model; }
};

/// Side information for offline providers; never sent over the wire.
struct PromptHints {
  struct Demo {
    Severity label;
    double fused;
  };
  std::vector<Demo> demos;
};

struct ChatRequest {
  std::string model;
  std::string user_message;
  double temperature = 0.0;
  double frequency_penalty = 0.0;
  double presence_penalty = 0.0;
  PromptHints hints;
};

/// OpenAI-compatible request body: model, messages[{role, content}],
/// temperature, frequency_penalty, presence_penalty.
std::string chat_request_body(const ChatRequest& request);

/// First choice's message content. Throws ProtocolError otherwise.
std::string extract_chat_content(std::string_view body);

/// Body in the shape extract_chat_content expects; used by the mocks.
std::string make_chat_response_body(std::string_view content);

struct ProviderResponse {
  int status = 0;
  std::string body;
};

/// One chat-completion endpoint. send() throws TransportError when no HTTP
/// response was obtained. Implementations must be callable concurrently.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ProviderResponse send(const ChatRequest& request) = 0;
};

/// POSTs to {base_url}/chat/completions with a bearer token.
class HttpChatProvider final : public ChatProvider {
 public:
  HttpChatProvider(std::string base_url, std::string api_key, std::chrono::milliseconds timeout);
  ProviderResponse send(const ChatRequest& request) override;

 private:
  std::string origin_;
  std::string path_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

/// Base for offline providers: counts calls and tracks peak concurrency.
class MockProvider : public ChatProvider {
 public:
  ProviderResponse send(const ChatRequest& request) final;

  std::size_t calls() const noexcept { return calls_.load(); }
  std::size_t max_in_flight() const noexcept { return max_in_flight_.load(); }
  /// Artificial per-call latency, to make overlapping calls observable.
  void set_delay(std::chrono::milliseconds delay) { delay_ = delay; }

 protected:
  virtual ProviderResponse respond(const ChatRequest& request) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
  std::chrono::milliseconds delay_{0};
};

/// Always answers with the same text.
class FixedAnswerProvider final : public MockProvider {
 public:
  explicit FixedAnswerProvider(std::string answer) : answer_(std::move(answer)) {}

 protected:
  ProviderResponse respond(const ChatRequest& request) override;

 private:
  std::string answer_;
};

/// Answers with the label of the demonstration with the highest fused
/// similarity (first in rank order on ties); empty answer for zero-shot.
class CopyNearestProvider final : public MockProvider {
 protected:
  ProviderResponse respond(const ChatRequest& request) override;
};

/// Builds the provider named by config.kind. Live providers read the API key
/// from the environment variable config.api_key_env.
std::shared_ptr<ChatProvider> make_provider(const ProviderConfig& config);

/// Content-addressed response store: one file per prompt hash holding the raw
/// response body. Writes are serialized and atomic (temp file + rename).
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<std::string> get(std::string_view key) const;
  void put(std::string_view key, std::string_view body);
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path file_for(std::string_view key) const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

/// Digest of model, sampling hyperparameters and prompt text.
std::string prompt_hash(const ProviderConfig& config, std::string_view full_text);

/// Case-insensitive whole-word search for the four level names. Exactly one
/// distinct level -> that level; none or several -> nullopt (Invalid).
std::optional<Severity> parse_severity(std::string_view raw);

struct AssessmentResult {
  std::string target_id;
  std::optional<Severity> predicted;  // nullopt = Invalid
  std::string raw;                    // verbatim model answer
  Severity truth = Severity::kLow;
  std::string prompt_hash;
  bool from_cache = false;
  std::chrono::milliseconds latency{0};
  std::size_t retries = 0;
};

struct AssessmentJob {
  std::string target_id;
  Severity truth = Severity::kLow;
  std::string prompt;
  PromptHints hints;
};

/// Counting semaphore whose limit is chosen at run time.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(std::size_t limit);
  void acquire();
  void release();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::size_t available_;
};

/// Sends prompts through a provider with caching, bounded concurrency and
/// retries (exponential backoff with seeded jitter on transport errors, 429
/// and 5xx). Safe to share across worker threads.
class Assessor {
 public:
  Assessor(ProviderConfig config, std::shared_ptr<ChatProvider> provider,
           std::optional<std::filesystem::path> cache_dir);

  AssessmentResult assess(const AssessmentJob& job);

  /// Runs jobs on `workers` threads; results come back in job order.
  std::vector<AssessmentResult> assess_all(const std::vector<AssessmentJob>& jobs,
                                           std::size_t workers);

  const ProviderConfig& config() const noexcept { return config_; }
  std::size_t network_calls() const noexcept { return network_calls_.load(); }
  std::size_t tokens_sent() const noexcept { return tokens_sent_.load(); }

 private:
  std::string fetch(const ChatRequest& request, const std::string& key, std::size_t& retries);

  ProviderConfig config_;
  std::shared_ptr<ChatProvider> provider_;
  std::optional<ResponseCache> cache_;
  ConcurrencyLimiter limiter_;
  std::atomic<std::size_t> network_calls_{0};
  std::atomic<std::size_t> tokens_sent_{0};
};

}  // namespace svaicl
