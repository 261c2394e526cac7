#include <cstdlib>
#include <string>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "hrrpbench/errors.hpp"
#include "hrrpbench/llm.hpp"

namespace hrrp {

namespace {

// "https://host[:port]/prefix" -> (scheme://host[:port], /prefix)
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
  std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("base_url must include a scheme: " + base_url);
  std::size_t path_begin = base_url.find('/', scheme_end + 3);
  if (path_begin == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(path_begin);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, path_begin), prefix};
}

}  // namespace

Transport make_http_transport() {
  return [](const BackendConfig& cfg, const std::string& request_json) -> HttpResult {
    HttpResult result;
    auto [host, prefix] = split_base_url(cfg.base_url);

    httplib::Client client(host);
    client.set_connection_timeout(std::chrono::duration<double>(cfg.timeout_s));
    client.set_read_timeout(std::chrono::duration<double>(cfg.timeout_s));
    client.set_write_timeout(std::chrono::duration<double>(cfg.timeout_s));

    httplib::Headers headers;
    if (!cfg.api_key_env.empty()) {
      const char* key = std::getenv(cfg.api_key_env.c_str());
      if (key == nullptr || *key == '\0') {
        result.transport_error = true;
        result.error = "environment variable " + cfg.api_key_env + " is not set";
        return result;
      }
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    auto response = client.Post(prefix + "/chat/completions", headers, request_json,
                                "application/json");
    if (!response) {
      // httplib folds read/write timeouts into Read/Write errors; only
      // connection timeouts are distinguishable, the rest retry as
      // transport failures.
      result.timed_out = response.error() == httplib::Error::ConnectionTimeout;
      result.transport_error = !result.timed_out;
      result.error = httplib::to_string(response.error());
      return result;
    }
    result.status = response->status;
    result.body = response->body;
    return result;
  };
}

}  // namespace hrrp
