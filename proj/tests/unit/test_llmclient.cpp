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

#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "svaicl/error.hpp"
#include "svaicl/llmclient.hpp"
#include "test_support.hpp"

using namespace svaicl;
using namespace std::chrono_literals;

namespace {

// Loopback chat endpoint whose replies are scripted per request number.
class FakeEndpoint {
 public:
  using Script = std::function<std::pair<int, std::string>(int call, const httplib::Request&)>;

  explicit FakeEndpoint(Script script) : script_(std::move(script)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int call;
      {
        std::lock_guard lock(mutex_);
        call = calls_++;
        bodies_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      auto [status, body] = script_(call, req);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }
  std::string body(std::size_t i) const {
    std::lock_guard lock(mutex_);
    return bodies_.at(i);
  }
  std::string auth(std::size_t i) const {
    std::lock_guard lock(mutex_);
    return auth_.at(i);
  }

 private:
  Script script_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  int calls_ = 0;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

ProviderConfig fast_config() {
  ProviderConfig c;
  c.kind = "openai";
  c.model = "test-model";
  c.backoff_base = 1ms;
  c.backoff_max = 4ms;
  c.timeout = 5000ms;
  return c;
}

AssessmentJob job(std::string id, std::string prompt, Severity truth = Severity::kHigh) {
  return {std::move(id), truth, std::move(prompt), {}};
}

}  // namespace

TEST_SUITE("llmclient") {

TEST_CASE("severity parsing") {
  CHECK(parse_severity("High") == Severity::kHigh);
  CHECK(parse_severity("  critical.\n") == Severity::kCritical);
  CHECK(parse_severity("The severity is MEDIUM.") == Severity::kMedium);
  CHECK(parse_severity("Low, definitely low") == Severity::kLow);
  CHECK_FALSE(parse_severity("Could be High or Medium"));
  CHECK_FALSE(parse_severity("Highly uncertain"));
  CHECK_FALSE(parse_severity("lowest"));
  CHECK_FALSE(parse_severity(""));
  CHECK(parse_severity("[High]") == Severity::kHigh);
  CHECK_FALSE(parse_severity("high_risk"));
}

TEST_CASE("wire format") {
  ChatRequest req;
  req.model = "m";
  req.user_message = "hello \"there\"";
  req.temperature = 0.0;
  req.hints.demos.push_back({Severity::kLow, 0.3});
  const auto j = nlohmann::json::parse(chat_request_body(req));
  CHECK(j["model"] == "m");
  CHECK(j["messages"].size() == 1);
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j["messages"][0]["content"] == "hello \"there\"");
  CHECK(j["temperature"] == 0.0);
  CHECK(j.contains("frequency_penalty"));
  CHECK(j.contains("presence_penalty"));
  CHECK(chat_request_body(req).find("hints") == std::string::npos);

  CHECK(extract_chat_content(make_chat_response_body("Low")) == "Low");
  CHECK(extract_chat_content(R"({"choices":[{"message":{"role":"assistant","content":"x"}}]})") == "x");
  CHECK_THROWS_AS(extract_chat_content("not json"), ProtocolError);
  CHECK_THROWS_AS(extract_chat_content(R"({"choices":[]})"), ProtocolError);
  CHECK_THROWS_AS(extract_chat_content(R"({"choices":[{"message":{}}]})"), ProtocolError);
}

TEST_CASE("prompt hash covers model, hyperparameters and text") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  ProviderConfig c = fast_config();
  const auto h = prompt_hash(c, "text");
  CHECK(h.size() == 64);
  CHECK(prompt_hash(c, "text") == h);
  CHECK(prompt_hash(c, "text!") != h);
  auto other = c;
  other.model = "other";
  CHECK(prompt_hash(other, "text") != h);
  other = c;
  other.temperature = 0.5;
  CHECK(prompt_hash(other, "text") != h);
  other = c;
  other.presence_penalty = 0.1;
  CHECK(prompt_hash(other, "text") != h);
}

TEST_CASE("retries on 429 then succeeds") {
  FakeEndpoint server([](int call, const httplib::Request&) -> std::pair<int, std::string> {
    if (call == 0) return {429, R"({"error":"slow down"})"};
    if (call == 1) return {503, "unavailable"};
    return {200, make_chat_response_body("Medium")};
  });
  auto cfg = fast_config();
  cfg.base_url = server.base_url();
  auto provider = std::make_shared<HttpChatProvider>(cfg.base_url, "sk-test", cfg.timeout);
  Assessor assessor(cfg, provider, std::nullopt);
  const auto r = assessor.assess(job("A", "prompt text"));
  CHECK(r.predicted == Severity::kMedium);
  CHECK(r.raw == "Medium");
  CHECK(r.retries == 2);
  CHECK(server.calls() == 3);
  CHECK(assessor.network_calls() == 3);
  CHECK(server.auth(0) == "Bearer sk-test");
  const auto body = nlohmann::json::parse(server.body(0));
  CHECK(body["model"] == "test-model");
  CHECK(body["messages"][0]["content"] == "prompt text");
}

TEST_CASE("non-retryable status and exhausted retries") {
  SUBCASE("400 fails at once") {
    FakeEndpoint server([](int, const httplib::Request&) { return std::pair<int, std::string>{400, "bad"}; });
    auto cfg = fast_config();
    Assessor assessor(cfg, std::make_shared<HttpChatProvider>(server.base_url(), "k", cfg.timeout),
                      std::nullopt);
    try {
      assessor.assess(job("A", "p"));
      FAIL("expected ProviderError");
    } catch (const ProviderError& e) {
      CHECK(e.status() == 400);
    }
    CHECK(server.calls() == 1);
  }
  SUBCASE("500 until retries run out") {
    FakeEndpoint server([](int, const httplib::Request&) { return std::pair<int, std::string>{500, "x"}; });
    auto cfg = fast_config();
    cfg.max_retries = 2;
    Assessor assessor(cfg, std::make_shared<HttpChatProvider>(server.base_url(), "k", cfg.timeout),
                      std::nullopt);
    CHECK_THROWS_AS(assessor.assess(job("A", "p")), ProviderError);
    CHECK(server.calls() == 3);
  }
  SUBCASE("malformed 200 is a protocol error") {
    FakeEndpoint server([](int, const httplib::Request&) { return std::pair<int, std::string>{200, "{}"}; });
    auto cfg = fast_config();
    Assessor assessor(cfg, std::make_shared<HttpChatProvider>(server.base_url(), "k", cfg.timeout),
                      std::nullopt);
    CHECK_THROWS_AS(assessor.assess(job("A", "p")), ProtocolError);
  }
}

TEST_CASE("transport errors are retried and then reported") {
  httplib::Server probe;
  const int port = probe.bind_to_any_port("127.0.0.1");
  probe.stop();  // nothing listens on this port any more
  auto cfg = fast_config();
  cfg.max_retries = 1;
  cfg.timeout = 500ms;
  Assessor assessor(cfg,
                    std::make_shared<HttpChatProvider>("http://127.0.0.1:" + std::to_string(port),
                                                       "k", cfg.timeout),
                    std::nullopt);
  CHECK_THROWS_AS(assessor.assess(job("A", "p")), TransportError);
  CHECK(assessor.network_calls() == 2);
}

TEST_CASE("cache replays without calling the provider") {
  testing::TempDir dir;
  ProviderConfig cfg;
  cfg.kind = "mock-fixed:High";
  auto provider = std::make_shared<FixedAnswerProvider>("High");
  {
    Assessor first(cfg, provider, dir.path());
    const auto r = first.assess(job("A", "p1"));
    CHECK_FALSE(r.from_cache);
    CHECK(first.network_calls() == 1);
  }
  Assessor second(cfg, provider, dir.path());
  const auto r = second.assess(job("A", "p1"));
  CHECK(r.from_cache);
  CHECK(r.predicted == Severity::kHigh);
  CHECK(second.network_calls() == 0);
  CHECK(provider->calls() == 1);
  CHECK(std::filesystem::exists(dir / (r.prompt_hash + ".json")));

  second.assess(job("B", "p2"));
  CHECK(provider->calls() == 2);
}

TEST_CASE("response cache") {
  testing::TempDir dir;
  ResponseCache cache(dir / "nested" / "cache");
  CHECK_FALSE(cache.get("k"));
  cache.put("k", "body-1");
  CHECK(cache.get("k") == "body-1");
  cache.put("k", "body-2");
  CHECK(cache.get("k") == "body-2");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(cache.dir())) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);
}

TEST_CASE("invalid answers and the retry-invalid switch") {
  ProviderConfig cfg;
  cfg.kind = "mock-fixed:High or Low";
  auto provider = std::make_shared<FixedAnswerProvider>("High or Low");
  Assessor plain(cfg, provider, std::nullopt);
  const auto r = plain.assess(job("A", "p"));
  CHECK_FALSE(r.predicted);
  CHECK(r.raw == "High or Low");
  CHECK(provider->calls() == 1);

  cfg.retry_invalid = true;
  Assessor retrying(cfg, provider, std::nullopt);
  retrying.assess(job("A", "p"));
  CHECK(provider->calls() == 3);
}

TEST_CASE("copy-nearest mock") {
  ProviderConfig cfg;
  auto provider = std::make_shared<CopyNearestProvider>();
  Assessor assessor(cfg, provider, std::nullopt);
  AssessmentJob j = job("A", "p");
  j.hints.demos = {{Severity::kLow, 0.2}, {Severity::kCritical, 0.9}, {Severity::kHigh, 0.9}};
  CHECK(assessor.assess(j).predicted == Severity::kCritical);
  j.hints.demos.clear();
  const auto zero = assessor.assess(j);
  CHECK_FALSE(zero.predicted);
  CHECK(zero.raw.empty());
}

TEST_CASE("concurrency stays within the limit") {
  ProviderConfig cfg;
  cfg.kind = "mock-fixed:Low";
  cfg.max_concurrent_requests = 3;
  auto provider = std::make_shared<FixedAnswerProvider>("Low");
  provider->set_delay(20ms);
  Assessor assessor(cfg, provider, std::nullopt);
  std::vector<AssessmentJob> jobs;
  for (int i = 0; i < 24; ++i) jobs.push_back(job("T" + std::to_string(100 + i), "p" + std::to_string(i)));
  const auto results = assessor.assess_all(jobs, 8);
  REQUIRE(results.size() == 24);
  for (std::size_t i = 0; i < 24; ++i) CHECK(results[i].target_id == jobs[i].target_id);
  CHECK(provider->max_in_flight() <= 3);
  CHECK(provider->max_in_flight() >= 2);
  CHECK(provider->calls() == 24);
}

TEST_CASE("provider factory") {
  ProviderConfig cfg;
  CHECK(dynamic_cast<CopyNearestProvider*>(make_provider(cfg).get()) != nullptr);
  cfg.kind = "mock-fixed:Critical";
  CHECK(dynamic_cast<FixedAnswerProvider*>(make_provider(cfg).get()) != nullptr);
  cfg.kind = "carrier-pigeon";
  CHECK_THROWS_AS(make_provider(cfg), UsageError);
  cfg.kind = "openai";
  cfg.base_url = "http://127.0.0.1:1/v1";
  cfg.model = "m";
  cfg.api_key_env = "SVAICL_TEST_KEY_THAT_IS_NOT_SET";
  ::unsetenv(cfg.api_key_env.c_str());
  CHECK_THROWS_AS(make_provider(cfg), UsageError);
  ::setenv(cfg.api_key_env.c_str(), "k", 1);
  CHECK(dynamic_cast<HttpChatProvider*>(make_provider(cfg).get()) != nullptr);
  ::unsetenv(cfg.api_key_env.c_str());
  CHECK_THROWS_AS(HttpChatProvider("no-scheme", "k", 1000ms), UsageError);
  CHECK(cfg.effective_model() == "m");
  cfg.kind = "mock-copy-nearest";
  CHECK(cfg.effective_model() == "mock-copy-nearest");
}

}  // TEST_SUITE
