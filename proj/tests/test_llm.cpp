#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <json.hpp>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/llm.hpp"
#include "hrrpbench/rng.hpp"
#include "test_support.hpp"

using namespace hrrp;

namespace {

const std::vector<std::string> kCandidates = {"EA-18G", "IDF", "Mirage-2000"};

RawResponse raw(const std::string& text) {
  RawResponse r;
  r.text = text;
  r.http_status = 200;
  return r;
}

// Scripted transport: replays a fixed status sequence, then repeats the last.
struct FakeTransport {
  std::vector<HttpResult> script;
  int calls = 0;

  Transport fn() {
    return [this](const BackendConfig&, const std::string&) -> HttpResult {
      HttpResult r = script[std::min<std::size_t>(static_cast<std::size_t>(calls),
                                                  script.size() - 1)];
      ++calls;
      return r;
    };
  }
};

HttpResult ok_result(const std::string& content) {
  nlohmann::json message{{"role", "assistant"}, {"content", content}};
  nlohmann::json choice{{"message", message}, {"finish_reason", "stop"}};
  nlohmann::json body{{"model", "test-model"},
                      {"choices", nlohmann::json::array({choice})},
                      {"usage", {{"prompt_tokens", 10}, {"completion_tokens", 5}}}};
  HttpResult r;
  r.status = 200;
  r.body = body.dump();
  return r;
}

HttpResult status_result(int status, const std::string& body = "{}") {
  HttpResult r;
  r.status = status;
  r.body = body;
  return r;
}

struct SleepRecorder {
  std::vector<long> delays_ms;
  SleepFn fn() {
    return [this](std::chrono::milliseconds d) { delays_ms.push_back(d.count()); };
  }
};

BackendConfig quick_config(int max_retries = 3) {
  BackendConfig cfg;
  cfg.max_retries = max_retries;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("llm");

TEST_CASE("parse_prediction honors the answer line") {
  auto p = parse_prediction(raw("ANSWER: Mirage-2000\nREASON: mid-body dominant SC matches "
                                "support"),
                            kCandidates);
  CHECK(p.predicted_label == "Mirage-2000");
  CHECK(p.explanation == "mid-body dominant SC matches support");
}

TEST_CASE("parse_prediction falls back to a unique mention") {
  auto p = parse_prediction(raw("the target is likely mirage-2000."), kCandidates);
  CHECK(p.predicted_label == "Mirage-2000");
  CHECK(p.explanation == "the target is likely mirage-2000.");
}

TEST_CASE("ambiguous mentions are unparseable") {
  auto p = parse_prediction(raw("could be EA-18G, or maybe IDF"), kCandidates);
  CHECK(p.predicted_label == kUnparseableLabel);

  CHECK(parse_prediction(raw(""), kCandidates).predicted_label == kUnparseableLabel);
  CHECK(parse_prediction(raw("no idea"), kCandidates).predicted_label == kUnparseableLabel);
}

TEST_CASE("answer-line variants parse") {
  CHECK(parse_prediction(raw("**ANSWER:** IDF"), kCandidates).predicted_label == "IDF");
  CHECK(parse_prediction(raw("answer: idf."), kCandidates).predicted_label == "IDF");
  CHECK(parse_prediction(raw("ANSWER: \"EA-18G\""), kCandidates).predicted_label == "EA-18G");
  CHECK(parse_prediction(raw("ANSWER: the class is IDF"), kCandidates).predicted_label ==
        "IDF");
  // The last answer line wins.
  CHECK(parse_prediction(raw("ANSWER: IDF\nwait\nANSWER: EA-18G"), kCandidates)
            .predicted_label == "EA-18G");
  // An answer naming two candidates is ambiguous; full text also mentions both.
  CHECK(parse_prediction(raw("ANSWER: IDF or EA-18G"), kCandidates).predicted_label ==
        kUnparseableLabel);
}

TEST_CASE("parse_prediction is total over junk input") {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    int len = static_cast<int>(rng.below(120));
    for (int i = 0; i < len; ++i)
      text.push_back(static_cast<char>(32 + rng.below(95)));
    auto p = parse_prediction(raw(text), kCandidates);
    bool valid = p.predicted_label == kUnparseableLabel;
    for (const auto& c : kCandidates) valid = valid || p.predicted_label == c;
    CHECK(valid);
  }
}

TEST_CASE("retry: 429 then success takes two attempts") {
  FakeTransport transport;
  transport.script = {status_result(429), ok_result("ANSWER: IDF")};
  SleepRecorder sleeper;
  ChatClient client(quick_config(), transport.fn(), sleeper.fn());

  RawResponse response = client.complete("prompt");
  CHECK(response.attempts == 2);
  CHECK(transport.calls == 2);
  CHECK(response.text == "ANSWER: IDF");
  CHECK(response.model_reported == "test-model");
  CHECK(response.prompt_tokens == 10);
  REQUIRE(sleeper.delays_ms.size() == 1);
  CHECK(sleeper.delays_ms[0] >= 500);
  CHECK(sleeper.delays_ms[0] <= 1000);
}

TEST_CASE("retry: persistent 500s exhaust max_retries+1 attempts") {
  FakeTransport transport;
  transport.script = {status_result(500)};
  SleepRecorder sleeper;
  ChatClient client(quick_config(2), transport.fn(), sleeper.fn());

  CHECK_THROWS_AS(client.complete("prompt"), BackendError);
  CHECK(transport.calls == 3);  // attempts <= max_retries + 1
  REQUIRE(sleeper.delays_ms.size() == 2);
  CHECK(sleeper.delays_ms[0] <= sleeper.delays_ms[1] * 2);  // jittered
}

TEST_CASE("pre-jitter backoff is non-decreasing") {
  for (int i = 0; i + 1 < 10; ++i) {
    CHECK(backoff_base_delay(i).count() <= backoff_base_delay(i + 1).count());
  }
  CHECK(backoff_base_delay(0).count() == 1000);
  CHECK(backoff_base_delay(1).count() == 2000);
  CHECK(backoff_base_delay(2).count() == 4000);
}

TEST_CASE("timeouts raise TimeoutError without retrying") {
  FakeTransport transport;
  HttpResult timeout;
  timeout.timed_out = true;
  transport.script = {timeout};
  SleepRecorder sleeper;
  ChatClient client(quick_config(), transport.fn(), sleeper.fn());
  CHECK_THROWS_AS(client.complete("prompt"), TimeoutError);
  CHECK(transport.calls == 1);
  CHECK(sleeper.delays_ms.empty());
}

TEST_CASE("content blocking is surfaced distinctly") {
  FakeTransport transport;
  SleepRecorder sleeper;
  transport.script = {status_result(400, R"({"error":{"code":"content_filter"}})")};
  ChatClient client(quick_config(), transport.fn(), sleeper.fn());
  CHECK_THROWS_AS(client.complete("prompt about F22"), ContentBlockedError);

  FakeTransport filtered;
  HttpResult r = ok_result("partial");
  nlohmann::json body = nlohmann::json::parse(r.body);
  body["choices"][0]["finish_reason"] = "content_filter";
  r.body = body.dump();
  filtered.script = {r};
  SleepRecorder sleeper2;
  ChatClient client2(quick_config(), filtered.fn(), sleeper2.fn());
  CHECK_THROWS_AS(client2.complete("prompt"), ContentBlockedError);
}

TEST_CASE("backend errors never leak the API key") {
  setenv("HRRP_TEST_KEY", "sk-super-secret-value", 1);
  BackendConfig cfg = quick_config(0);
  cfg.api_key_env = "HRRP_TEST_KEY";
  FakeTransport transport;
  SleepRecorder sleeper;
  transport.script = {status_result(500, "upstream exploded")};
  ChatClient client(cfg, transport.fn(), sleeper.fn());
  try {
    client.complete("prompt");
    FAIL("expected BackendError");
  } catch (const BackendError& ex) {
    CHECK(std::string(ex.what()).find("sk-super-secret") == std::string::npos);
  }
}

TEST_CASE("request body carries the chat-completion shape") {
  BackendConfig cfg;
  cfg.model_name = "test-model";
  cfg.temperature = 0.0;
  cfg.max_output_tokens = 99;
  auto body = nlohmann::json::parse(build_chat_request_body(cfg, "hello"));
  CHECK(body["model"] == "test-model");
  CHECK(body["temperature"] == 0.0);
  CHECK(body["max_tokens"] == 99);
  REQUIRE(body["messages"].size() == 1);
  CHECK(body["messages"][0]["role"] == "user");
  CHECK(body["messages"][0]["content"] == "hello");
}

TEST_CASE("scripted mock replays fixtures byte-stably") {
  ScriptedMockBackend mock;
  mock.add_response("prompt-a", "ANSWER: IDF\nREASON: fixture");
  CHECK(mock.complete("prompt-a").text == "ANSWER: IDF\nREASON: fixture");
  CHECK(mock.complete("prompt-a").text == mock.complete("prompt-a").text);
  CHECK_THROWS_AS(mock.complete("prompt-unknown"), MockError);

  mock.set_default_response("ANSWER: EA-18G");
  CHECK(mock.complete("prompt-unknown").text == "ANSWER: EA-18G");
}

TEST_CASE("scripted mock loads fixture files keyed by prompt hash") {
  auto dir = testsupport::scratch_dir("fixtures");
  char key[24];
  std::snprintf(key, sizeof(key), "%016llx",
                static_cast<unsigned long long>(fnv1a64("the-prompt")));
  nlohmann::json fixture{{key, "ANSWER: IDF"}, {"*", "ANSWER: EA-18G"}};
  testsupport::write_file(dir / "fixtures.json", fixture.dump());

  auto mock = ScriptedMockBackend::from_fixture_file(dir / "fixtures.json");
  CHECK(mock.complete("the-prompt").text == "ANSWER: IDF");
  CHECK(mock.complete("other").text == "ANSWER: EA-18G");
}

TEST_CASE("nearest-neighbor mock answers with the closest support") {
  std::string prompt =
      "[SUPPORT EXAMPLES]\n"
      "Example 1 (label: EA-18G):\n"
      "[{'position_index': 10, 'amplitude': 1.000}]\n"
      "Example 2 (label: IDF):\n"
      "[{'position_index': 40, 'amplitude': 1.000}]\n"
      "\n"
      "[QUERY]\n"
      "[{'position_index': 38, 'amplitude': 1.000}]\n";
  NearestNeighborMockBackend mock(10, 64);
  auto response = mock.complete(prompt);
  auto pred = parse_prediction(response, kCandidates);
  CHECK(pred.predicted_label == "IDF");

  SUBCASE("identical query picks that support with distance zero") {
    std::string same = prompt;
    same.replace(same.find("38"), 2, "10");
    CHECK(parse_prediction(mock.complete(same), kCandidates).predicted_label == "EA-18G");
  }
}

TEST_CASE("nearest-neighbor ties go to the earliest support") {
  // n_r = 64 keeps the positions exactly representable: 10/64, 11/64, 12/64.
  std::string prompt =
      "Example 1 (label: IDF):\n"
      "[{'position_index': 10, 'amplitude': 1.000}]\n"
      "Example 2 (label: EA-18G):\n"
      "[{'position_index': 12, 'amplitude': 1.000}]\n"
      "[QUERY]\n"
      "[{'position_index': 11, 'amplitude': 1.000}]\n";
  NearestNeighborMockBackend mock(10, 64);
  CHECK(parse_prediction(mock.complete(prompt), kCandidates).predicted_label == "IDF");
}

TEST_CASE("nearest-neighbor mock rejects prompts without SC data") {
  NearestNeighborMockBackend mock(10, 306);
  CHECK_THROWS_AS(mock.complete("no serializations here"), MockError);
  CHECK_THROWS_AS(mock.complete("[QUERY]\n[{'position_index': 3, 'amplitude': 0.5}]\n"),
                  MockError);  // no supports
  CHECK_THROWS_AS(mock.complete("Example 1 (label: A):\n"
                                "[{'position_index': 3, 'amplitude': 0.5}]\n"),
                  MockError);  // no query
}

TEST_CASE("failure injection is deterministic and hash-keyed") {
  auto inner = std::make_unique<ScriptedMockBackend>();
  inner->set_default_response("ANSWER: IDF");
  FailureInjectingBackend always(std::move(inner), 100);
  CHECK_THROWS_AS(always.complete("x"), BackendError);

  auto inner2 = std::make_unique<ScriptedMockBackend>();
  inner2->set_default_response("ANSWER: IDF");
  FailureInjectingBackend never(std::move(inner2), 0);
  CHECK(never.complete("x").text == "ANSWER: IDF");

  auto make_injected = [] {
    auto in = std::make_unique<ScriptedMockBackend>();
    in->set_default_response("ANSWER: IDF");
    return FailureInjectingBackend(std::move(in), 50);
  };
  auto a = make_injected();
  auto b = make_injected();
  for (int i = 0; i < 40; ++i) {
    std::string prompt = "prompt-" + std::to_string(i);
    bool failed_a = false, failed_b = false;
    try {
      a.complete(prompt);
    } catch (const BackendError&) {
      failed_a = true;
    }
    try {
      b.complete(prompt);
    } catch (const BackendError&) {
      failed_b = true;
    }
    CHECK(failed_a == failed_b);
  }
}

TEST_CASE("make_backend validates its spec") {
  BackendConfig cfg;
  CHECK(make_backend("mock:nn", cfg, 10, 306, {})->name() == "mock:nn");
  CHECK_THROWS_AS(make_backend("mock:script", cfg, 10, 306, {}), ConfigError);
  CHECK_THROWS_AS(make_backend("bogus", cfg, 10, 306, {}), ConfigError);
}

TEST_SUITE_END();
