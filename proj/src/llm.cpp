#include "hrrpbench/llm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <thread>

#include <json.hpp>

#include "hrrpbench/baselines.hpp"
#include "hrrpbench/errors.hpp"
#include "hrrpbench/rng.hpp"
#include "hrrpbench/scatter.hpp"

namespace hrrp {

using nlohmann::json;

void BackendConfig::validate() const {
  if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
  if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be positive");
  if (!(timeout_s > 0.0)) throw ConfigError("timeout_s must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
}

std::string build_chat_request_body(const BackendConfig& cfg, const std::string& prompt_text) {
  json body{{"model", cfg.model_name},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt_text}}})},
            {"temperature", cfg.temperature},
            {"max_tokens", cfg.max_output_tokens}};
  return body.dump();
}

std::chrono::milliseconds backoff_base_delay(int retry_index) {
  return std::chrono::milliseconds(1000L << std::min(retry_index, 20));
}

// ---------------------------------------------------------------------------
// parse_prediction

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim_punctuation(std::string_view text) {
  const std::string_view junk = " \t\r\n\"'`*_.,;:!?()[]{}<>";
  std::size_t begin = text.find_first_not_of(junk);
  if (begin == std::string_view::npos) return "";
  std::size_t end = text.find_last_not_of(junk);
  return std::string(text.substr(begin, end - begin + 1));
}

// Value of the last "ANSWER: <x>" line, if any. Tolerates leading markdown
// decoration and a case-insensitive keyword.
std::optional<std::string> last_answer_value(const std::string& text) {
  std::optional<std::string> value;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::size_t i = line.find_first_not_of(" \t*#>-");
    if (i == std::string::npos) continue;
    std::string low = lowercase(line);
    if (low.compare(i, 6, "answer") != 0) continue;
    std::size_t colon = line.find_first_of(":：", i + 6);
    if (colon == std::string::npos) continue;
    std::size_t gap = line.find_first_not_of(" \t", i + 6);
    if (gap != colon) continue;  // something other than whitespace before ':'
    value = line.substr(colon + 1);
  }
  return value;
}

std::vector<std::size_t> candidates_mentioned(const std::string& haystack_lower,
                                              const std::vector<std::string>& candidates) {
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (haystack_lower.find(lowercase(candidates[i])) != std::string::npos) found.push_back(i);
  }
  return found;
}

std::string extract_explanation(const std::string& text) {
  std::string low = lowercase(text);
  std::size_t pos = low.rfind("reason:");
  if (pos == std::string::npos) return text;
  std::string rest = text.substr(pos + 7);
  std::size_t begin = rest.find_first_not_of(" \t");
  if (begin == std::string::npos) return text;
  return rest.substr(begin);
}

}  // namespace

Prediction parse_prediction(const RawResponse& raw, const std::vector<std::string>& candidates) {
  Prediction pred;
  pred.predicted_label = kUnparseableLabel;
  pred.explanation = extract_explanation(raw.text);
  pred.latency_ms = raw.latency_ms;

  if (auto answer = last_answer_value(raw.text)) {
    std::string value = trim_punctuation(*answer);
    std::string value_lower = lowercase(value);
    for (const auto& c : candidates) {
      if (lowercase(c) == value_lower) {
        pred.predicted_label = c;
        return pred;
      }
    }
    // The answer line may wrap the class name in prose.
    auto mentioned = candidates_mentioned(value_lower, candidates);
    if (mentioned.size() == 1) {
      pred.predicted_label = candidates[mentioned[0]];
      return pred;
    }
  }

  auto mentioned = candidates_mentioned(lowercase(raw.text), candidates);
  if (mentioned.size() == 1) pred.predicted_label = candidates[mentioned[0]];
  return pred;
}

// ---------------------------------------------------------------------------
// ChatClient

namespace {

bool looks_content_blocked(int status, const std::string& body) {
  std::string low = lowercase(body);
  bool flagged = low.find("content_filter") != std::string::npos ||
                 low.find("content_policy") != std::string::npos ||
                 low.find("blocked") != std::string::npos ||
                 low.find("safety") != std::string::npos;
  return (status == 400 || status == 403 || status == 200) && flagged;
}

}  // namespace

ChatClient::ChatClient(BackendConfig cfg)
    : ChatClient(std::move(cfg), make_http_transport(),
                 [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

ChatClient::ChatClient(BackendConfig cfg, Transport transport, SleepFn sleep,
                       std::uint64_t jitter_seed)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), sleep_(std::move(sleep)),
      jitter_seed_(jitter_seed) {
  cfg_.validate();
}

RawResponse ChatClient::complete(const std::string& prompt_text) {
  const std::string request = build_chat_request_body(cfg_, prompt_text);
  Rng jitter(derive_seed(jitter_seed_, fnv1a64(prompt_text)));
  const auto start = std::chrono::steady_clock::now();

  HttpResult last{};
  int attempts = 0;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    last = transport_(cfg_, request);
    ++attempts;

    if (last.timed_out) throw TimeoutError("request timed out after " +
                                           std::to_string(cfg_.timeout_s) + " s");

    const bool retryable = last.transport_error || last.status == 429 || last.status >= 500;
    if (!retryable) break;
    if (attempt == cfg_.max_retries) break;

    // Equal jitter: half the base delay fixed, half uniform.
    auto base = backoff_base_delay(attempt);
    auto delay = std::chrono::milliseconds(
        base.count() / 2 + static_cast<long>(jitter.below(static_cast<std::uint64_t>(base.count() / 2 + 1))));
    sleep_(delay);
  }

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  if (last.transport_error) {
    throw BackendError("transport failure after " + std::to_string(attempts) +
                       " attempt(s): " + last.error);
  }
  if (looks_content_blocked(last.status, last.body) && last.status != 200) {
    throw ContentBlockedError("provider blocked the prompt (HTTP " +
                              std::to_string(last.status) + ")");
  }
  if (last.status == 429 || last.status >= 500) {
    throw BackendError("backend unavailable after " + std::to_string(attempts) +
                       " attempt(s), last HTTP status " + std::to_string(last.status));
  }
  if (last.status != 200) {
    throw BackendError("backend rejected the request, HTTP " + std::to_string(last.status));
  }

  json payload;
  try {
    payload = json::parse(last.body);
  } catch (const json::exception& ex) {
    throw BackendError(std::string("malformed backend response: ") + ex.what());
  }

  RawResponse response;
  response.http_status = last.status;
  response.attempts = attempts;
  response.latency_ms = elapsed.count();
  response.model_reported = payload.value("model", "");
  if (payload.contains("usage")) {
    response.prompt_tokens = payload["usage"].value("prompt_tokens", 0);
    response.completion_tokens = payload["usage"].value("completion_tokens", 0);
  }
  if (!payload.contains("choices") || payload["choices"].empty()) {
    throw BackendError("backend response has no choices");
  }
  const json& choice = payload["choices"][0];
  if (choice.value("finish_reason", "") == "content_filter") {
    throw ContentBlockedError("provider filtered the completion");
  }
  response.text = choice.at("message").value("content", "");
  return response;
}

// ---------------------------------------------------------------------------
// Mocks

void ScriptedMockBackend::add_response(const std::string& prompt_text,
                                       const std::string& response) {
  responses_[fnv1a64(prompt_text)] = response;
}

void ScriptedMockBackend::set_default_response(const std::string& response) {
  default_response_ = response;
}

ScriptedMockBackend ScriptedMockBackend::from_fixture_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read fixture file " + file.string());
  json j = json::parse(in);
  ScriptedMockBackend mock;
  for (const auto& [key, value] : j.items()) {
    if (key == "*") {
      mock.default_response_ = value.get<std::string>();
    } else {
      mock.responses_[std::stoull(key, nullptr, 16)] = value.get<std::string>();
    }
  }
  return mock;
}

RawResponse ScriptedMockBackend::complete(const std::string& prompt_text) {
  RawResponse response;
  response.http_status = 200;
  response.model_reported = "mock:script";
  auto it = responses_.find(fnv1a64(prompt_text));
  if (it != responses_.end()) {
    response.text = it->second;
  } else if (default_response_) {
    response.text = *default_response_;
  } else {
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(prompt_text)));
    throw MockError(std::string("no scripted response for prompt hash ") + hash);
  }
  return response;
}

namespace {

// A line is an SC serialization iff parse_serialized accepts it.
std::optional<ScatteringCenterSet> try_parse_sc_line(const std::string& line) {
  std::size_t begin = line.find_first_not_of(" \t");
  if (begin == std::string::npos || line[begin] != '[') return std::nullopt;
  try {
    return parse_serialized(line);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

std::optional<std::string> example_label(const std::string& line) {
  std::size_t open = line.find("(label: ");
  if (open == std::string::npos) return std::nullopt;
  std::size_t close = line.find(')', open);
  if (close == std::string::npos) return std::nullopt;
  return line.substr(open + 8, close - open - 8);
}

}  // namespace

RawResponse NearestNeighborMockBackend::complete(const std::string& prompt_text) {
  std::vector<std::pair<std::string, ScatteringCenterSet>> supports;
  std::optional<ScatteringCenterSet> query;

  std::istringstream stream(prompt_text);
  std::string line;
  std::optional<std::string> pending_label;
  bool in_query_section = false;
  while (std::getline(stream, line)) {
    if (line == "[QUERY]") {
      in_query_section = true;
      pending_label.reset();
      continue;
    }
    if (!line.empty() && line.front() == '[' && line.back() == ']' && !try_parse_sc_line(line)) {
      in_query_section = false;  // some other section header
    }
    if (auto label = example_label(line)) {
      pending_label = label;
      continue;
    }
    if (auto set = try_parse_sc_line(line)) {
      if (in_query_section) {
        query = set;
        in_query_section = false;
      } else if (pending_label) {
        supports.emplace_back(*pending_label, *set);
        pending_label.reset();
      }
    }
  }

  if (!query) throw MockError("prompt has no parseable query serialization");
  if (supports.empty()) throw MockError("prompt has no labeled support serializations");

  FeatureVector query_features;
  std::vector<FeatureVector> support_features;
  try {
    query_features = featurize_sc(*query, max_centers_, num_range_bins_);
    for (const auto& [label, set] : supports)
      support_features.push_back(featurize_sc(set, max_centers_, num_range_bins_));
  } catch (const DomainError& ex) {
    throw MockError(std::string("prompt SC sets incompatible with feature encoding: ") + ex.what());
  }

  std::size_t best = 0;
  double best_distance = squared_distance(query_features, support_features[0]);
  for (std::size_t i = 1; i < support_features.size(); ++i) {
    double d = squared_distance(query_features, support_features[i]);
    if (d < best_distance) {
      best_distance = d;
      best = i;
    }
  }

  RawResponse response;
  response.http_status = 200;
  response.model_reported = "mock:nn";
  response.text = "ANSWER: " + supports[best].first +
                  "\nREASON: Nearest support example by scattering-center feature distance "
                  "(example " + std::to_string(best + 1) + ").";
  return response;
}

FailureInjectingBackend::FailureInjectingBackend(std::unique_ptr<Backend> inner,
                                                 int fail_percent, std::uint64_t salt)
    : inner_(std::move(inner)), fail_percent_(fail_percent), salt_(salt) {
  if (fail_percent_ < 0 || fail_percent_ > 100)
    throw ConfigError("fail_percent must be in 0..100");
}

RawResponse FailureInjectingBackend::complete(const std::string& prompt_text) {
  if (static_cast<int>(derive_seed(salt_, fnv1a64(prompt_text)) % 100) < fail_percent_) {
    throw BackendError("injected permanent failure");
  }
  return inner_->complete(prompt_text);
}

std::string FailureInjectingBackend::name() const { return inner_->name(); }

std::unique_ptr<Backend> make_backend(const std::string& spec, const BackendConfig& cfg,
                                      int max_centers, int num_range_bins,
                                      const std::filesystem::path& fixtures_file) {
  if (spec == "mock:nn") {
    return std::make_unique<NearestNeighborMockBackend>(max_centers, num_range_bins);
  }
  if (spec == "mock:script") {
    if (fixtures_file.empty())
      throw ConfigError("backend mock:script needs a fixtures file");
    return std::make_unique<ScriptedMockBackend>(
        ScriptedMockBackend::from_fixture_file(fixtures_file));
  }
  if (spec == "api") {
    return std::make_unique<ChatClient>(cfg);
  }
  throw ConfigError("unknown backend '" + spec + "' (expected mock:nn, mock:script, or api)");
}

}  // namespace hrrp
