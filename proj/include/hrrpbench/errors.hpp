#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hrrp {

// Invalid argument or precondition violation in a numeric operation.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Signal is identically zero where a nonzero signal is required.
struct ZeroSignalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Episode sampling cannot be satisfied by the dataset.
struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed serialized text; carries the byte offset of the failure.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t byte_offset)
      : std::runtime_error(msg + " (at byte " + std::to_string(byte_offset) + ")"),
        offset(byte_offset) {}
  std::size_t offset;
};

// Classifier training cannot proceed (e.g. single-class input).
struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Remote or mock completion backend failed after exhausting its policy.
struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request exceeded the configured timeout.
struct TimeoutError : BackendError {
  using BackendError::BackendError;
};

// Provider refused to complete the prompt (content filtering).
struct ContentBlockedError : BackendError {
  using BackendError::BackendError;
};

// Mock backend cannot honor the request (missing fixture, unparseable prompt).
struct MockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hrrp
