#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hrrpbench/fewshot.hpp"

namespace hrrp {

// Sentinel label for responses that name no usable candidate. A value, not
// an error; scored as incorrect.
inline constexpr const char* kUnparseableLabel = "UNPARSEABLE";

struct BackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_output_tokens = 512;
  double timeout_s = 60.0;
  int max_retries = 3;
  int max_concurrency = 1;

  void validate() const;  // throws ConfigError
};

struct RawResponse {
  std::string text;
  std::string model_reported;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int http_status = 0;
  int attempts = 1;
  long latency_ms = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual RawResponse complete(const std::string& prompt_text) = 0;
  virtual std::string name() const = 0;
};

// One HTTP exchange as seen by the retry loop.
struct HttpResult {
  int status = 0;
  std::string body;
  bool transport_error = false;
  bool timed_out = false;
  std::string error;  // never contains credentials
};

using Transport = std::function<HttpResult(const BackendConfig&, const std::string& request_json)>;
using SleepFn = std::function<void(std::chrono::milliseconds)>;

// Pre-jitter backoff for the retry with this 0-based index: 1 s * 2^index.
std::chrono::milliseconds backoff_base_delay(int retry_index);

// Real HTTP transport (cpp-httplib) posting to <base_url>/chat/completions
// with bearer auth from $<api_key_env>.
Transport make_http_transport();

// The chat-completion request body (model, single user message, temperature,
// max_tokens); also what transcripts log.
std::string build_chat_request_body(const BackendConfig& cfg, const std::string& prompt_text);

// Single-turn chat client with retry on 429/5xx/transport errors
// (exponential backoff, base 1 s, factor 2, equal jitter). Timeouts raise
// TimeoutError; provider content filtering raises ContentBlockedError;
// exhausted retries raise BackendError. API keys are read from the
// environment inside the transport and never appear in errors or logs.
class ChatClient final : public Backend {
 public:
  explicit ChatClient(BackendConfig cfg);
  ChatClient(BackendConfig cfg, Transport transport, SleepFn sleep,
             std::uint64_t jitter_seed = 0);

  RawResponse complete(const std::string& prompt_text) override;
  std::string name() const override { return "api:" + cfg_.model_name; }

 private:
  BackendConfig cfg_;
  Transport transport_;
  SleepFn sleep_;
  std::uint64_t jitter_seed_;
};

// Total parser: maps any response text to a candidate or UNPARSEABLE.
// Rule: last line matching "ANSWER: <x>" wins, <x> matched case-insensitively
// after trimming punctuation; with no such line, the full text must mention
// exactly one candidate. Explanation is the text after "REASON:" when
// present, else the full text.
Prediction parse_prediction(const RawResponse& raw, const std::vector<std::string>& candidates);

// Replays canned responses keyed by FNV-1a hash of the exact prompt text.
class ScriptedMockBackend final : public Backend {
 public:
  ScriptedMockBackend() = default;

  void add_response(const std::string& prompt_text, const std::string& response);
  void set_default_response(const std::string& response);

  // JSON object: {"<16-hex prompt hash>": "response", ..., "*": "default"}.
  static ScriptedMockBackend from_fixture_file(const std::filesystem::path& file);

  RawResponse complete(const std::string& prompt_text) override;
  std::string name() const override { return "mock:script"; }

 private:
  std::map<std::uint64_t, std::string> responses_;
  std::optional<std::string> default_response_;
};

// Parses the support examples and query serializations out of the rendered
// prompt, then answers with the label of the nearest support under the
// squared Euclidean distance between featurize_sc vectors (ties: earliest
// support). Raises MockError when the prompt carries no parseable SC data.
class NearestNeighborMockBackend final : public Backend {
 public:
  NearestNeighborMockBackend(int max_centers, int num_range_bins)
      : max_centers_(max_centers), num_range_bins_(num_range_bins) {}

  RawResponse complete(const std::string& prompt_text) override;
  std::string name() const override { return "mock:nn"; }

 private:
  int max_centers_;
  int num_range_bins_;
};

// Deterministically fails a fixed percentage of prompts (keyed by prompt
// hash, so the outcome is independent of call order and concurrency).
class FailureInjectingBackend final : public Backend {
 public:
  FailureInjectingBackend(std::unique_ptr<Backend> inner, int fail_percent,
                          std::uint64_t salt = 0);

  RawResponse complete(const std::string& prompt_text) override;
  std::string name() const override;

 private:
  std::unique_ptr<Backend> inner_;
  int fail_percent_;
  std::uint64_t salt_;
};

// spec: "mock:nn" | "mock:script" | "api". mock:script requires a fixture
// file; mock:nn needs the extraction cap and profile length.
std::unique_ptr<Backend> make_backend(const std::string& spec, const BackendConfig& cfg,
                                      int max_centers, int num_range_bins,
                                      const std::filesystem::path& fixtures_file);

}  // namespace hrrp
