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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "svaicl/llmclient.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "svaicl/error.hpp"
#include "svaicl/random.hpp"

namespace svaicl {

namespace {

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool retryable(int status) { return status == 429 || (status >= 500 && status <= 599); }

class LimiterGuard {
 public:
  explicit LimiterGuard(ConcurrencyLimiter& limiter) : limiter_(limiter) { limiter_.acquire(); }
  ~LimiterGuard() { limiter_.release(); }
  LimiterGuard(const LimiterGuard&) = delete;
  LimiterGuard& operator=(const LimiterGuard&) = delete;

 private:
  ConcurrencyLimiter& limiter_;
};

}  // namespace

std::string chat_request_body(const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.model;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", request.user_message}}});
  body["temperature"] = request.temperature;
  body["frequency_penalty"] = request.frequency_penalty;
  body["presence_penalty"] = request.presence_penalty;
  return body.dump();
}

std::string extract_chat_content(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(fmt::format("response is not JSON: {}", e.what()));
  }
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (content.is_null()) return {};
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(fmt::format("response has no choices[0].message.content: {}", e.what()));
  }
}

std::string make_chat_response_body(std::string_view content) {
  nlohmann::ordered_json body;
  body["object"] = "chat.completion";
  body["choices"] = nlohmann::ordered_json::array({nlohmann::ordered_json{
      {"index", 0},
      {"message", {{"role", "assistant"}, {"content", std::string(content)}}},
      {"finish_reason", "stop"}}});
  return body.dump();
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string api_key,
                                   std::chrono::milliseconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme = base_url.find("://");
  if (scheme == std::string::npos)
    throw UsageError(fmt::format("base_url '{}' lacks a scheme", base_url));
  const auto slash = base_url.find('/', scheme + 3);
  origin_ = base_url.substr(0, slash);
  path_ = slash == std::string::npos ? std::string{} : base_url.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
}

ProviderResponse HttpChatProvider::send(const ChatRequest& request) {
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
  client.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
  client.set_write_timeout(secs.count(), static_cast<time_t>(usecs.count()));
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_ + "/chat/completions", headers, chat_request_body(request),
                         "application/json");
  if (!res)
    throw TransportError(fmt::format("POST {}{}/chat/completions failed: {}", origin_, path_,
                                     httplib::to_string(res.error())));
  return {res->status, res->body};
}

ProviderResponse MockProvider::send(const ChatRequest& request) {
  ++calls_;
  const std::size_t now = ++in_flight_;
  std::size_t peak = max_in_flight_.load();
  while (now > peak && !max_in_flight_.compare_exchange_weak(peak, now)) {
  }
  if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
  ProviderResponse res;
  try {
    res = respond(request);
  } catch (...) {
    --in_flight_;
    throw;
  }
  --in_flight_;
  return res;
}

ProviderResponse FixedAnswerProvider::respond(const ChatRequest&) {
  return {200, make_chat_response_body(answer_)};
}

ProviderResponse CopyNearestProvider::respond(const ChatRequest& request) {
  const PromptHints::Demo* best = nullptr;
  for (const auto& d : request.hints.demos)
    if (best == nullptr || d.fused > best->fused) best = &d;
  return {200, make_chat_response_body(best ? to_string(best->label) : "")};
}

std::shared_ptr<ChatProvider> make_provider(const ProviderConfig& config) {
  if (config.kind == "mock-copy-nearest") return std::make_shared<CopyNearestProvider>();
  if (config.kind.rfind("mock-fixed:", 0) == 0)
    return std::make_shared<FixedAnswerProvider>(config.kind.substr(11));
  if (config.kind == "openai") {
    if (config.base_url.empty()) throw UsageError("live provider needs provider.base_url");
    if (config.model.empty()) throw UsageError("live provider needs provider.model");
    const char* key = config.api_key_env.empty() ? nullptr : std::getenv(config.api_key_env.c_str());
    if (key == nullptr)
      throw UsageError(fmt::format("environment variable {} is not set", config.api_key_env));
    return std::make_shared<HttpChatProvider>(config.base_url, key, config.timeout);
  }
  throw UsageError(fmt::format(
      "unknown provider '{}' (expected mock-copy-nearest, mock-fixed:<answer> or openai)",
      config.kind));
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw DataError(fmt::format("cannot create cache dir '{}': {}", dir_.string(), ec.message()));
}

std::filesystem::path ResponseCache::file_for(std::string_view key) const {
  return dir_ / (std::string(key) + ".json");
}

std::optional<std::string> ResponseCache::get(std::string_view key) const {
  std::ifstream f(file_for(key), std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void ResponseCache::put(std::string_view key, std::string_view body) {
  std::lock_guard lock(mutex_);
  const auto final_path = file_for(key);
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError(fmt::format("cannot write cache entry '{}'", tmp.string()));
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw DataError(fmt::format("write failed for '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, final_path);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::kInternal, "SHA-256 digest failed");
  std::string hex;
  hex.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string prompt_hash(const ProviderConfig& config, std::string_view full_text) {
  std::string material = fmt::format("model={}\ntemperature={:.17g}\nfrequency_penalty={:.17g}\n"
                                     "presence_penalty={:.17g}\n\n",
                                     config.effective_model(), config.temperature,
                                     config.frequency_penalty, config.presence_penalty);
  material += full_text;
  return sha256_hex(material);
}

std::optional<Severity> parse_severity(std::string_view raw) {
  const std::string text = lower(raw);
  std::optional<Severity> found;
  for (Severity level : kSeverityTableOrder) {
    const std::string name = lower(to_string(level));
    for (auto pos = text.find(name); pos != std::string::npos; pos = text.find(name, pos + 1)) {
      const bool left_ok = pos == 0 || !word_char(text[pos - 1]);
      const std::size_t end = pos + name.size();
      const bool right_ok = end == text.size() || !word_char(text[end]);
      if (left_ok && right_ok) {
        if (found && *found != level) return std::nullopt;
        found = level;
        break;
      }
    }
  }
  return found;
}

ConcurrencyLimiter::ConcurrencyLimiter(std::size_t limit) : available_(std::max<std::size_t>(1, limit)) {}

void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return available_ > 0; });
  --available_;
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    ++available_;
  }
  cv_.notify_one();
}

Assessor::Assessor(ProviderConfig config, std::shared_ptr<ChatProvider> provider,
                   std::optional<std::filesystem::path> cache_dir)
    : config_(std::move(config)),
      provider_(std::move(provider)),
      limiter_(config_.max_concurrent_requests) {
  if (!provider_) throw UsageError("assessor needs a provider");
  if (cache_dir) cache_.emplace(*cache_dir);
}

std::string Assessor::fetch(const ChatRequest& request, const std::string& key,
                            std::size_t& retries) {
  for (std::size_t attempt = 0;; ++attempt) {
    const bool last = attempt >= config_.max_retries;
    try {
      ProviderResponse res;
      {
        LimiterGuard guard(limiter_);
        ++network_calls_;
        res = provider_->send(request);
      }
      if (res.status >= 200 && res.status < 300) {
        (void)extract_chat_content(res.body);
        return res.body;
      }
      if (!retryable(res.status) || last)
        throw ProviderError(fmt::format("provider answered HTTP {}: {}", res.status,
                                        res.body.substr(0, 200)),
                            res.status);
    } catch (const TransportError& e) {
      if (last)
        throw TransportError(fmt::format("{} (after {} retries)", e.what(), config_.max_retries));
    }

    ++retries;
    const auto base = config_.backoff_base.count();
    auto delay = std::min<std::int64_t>(config_.backoff_max.count(),
                                        base << std::min<std::size_t>(attempt, 20));
    if (delay > 0) {
      Rng rng(derive_seed(attempt, key));
      delay += static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(delay / 2 + 1)));
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
  }
}

AssessmentResult Assessor::assess(const AssessmentJob& job) {
  const auto started = std::chrono::steady_clock::now();
  AssessmentResult result;
  result.target_id = job.target_id;
  result.truth = job.truth;
  result.prompt_hash = prompt_hash(config_, job.prompt);

  ChatRequest request;
  request.model = config_.effective_model();
  request.user_message = job.prompt;
  request.temperature = config_.temperature;
  request.frequency_penalty = config_.frequency_penalty;
  request.presence_penalty = config_.presence_penalty;
  request.hints = job.hints;

  auto answer = [&](const std::string& key, bool use_cache) {
    if (cache_ && use_cache) {
      if (auto hit = cache_->get(key)) {
        result.from_cache = true;
        return extract_chat_content(*hit);
      }
    }
    tokens_sent_ += estimate_tokens(job.prompt);
    std::string body = fetch(request, key, result.retries);
    if (cache_) cache_->put(key, body);
    return extract_chat_content(body);
  };

  result.raw = answer(result.prompt_hash, true);
  result.predicted = parse_severity(result.raw);
  if (!result.predicted && config_.retry_invalid) {
    result.raw = answer(result.prompt_hash + "-r1", true);
    result.predicted = parse_severity(result.raw);
  }
  result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  return result;
}

std::vector<AssessmentResult> Assessor::assess_all(const std::vector<AssessmentJob>& jobs,
                                                   std::size_t workers) {
  std::vector<AssessmentResult> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = assess(jobs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, jobs.size()));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace svaicl
