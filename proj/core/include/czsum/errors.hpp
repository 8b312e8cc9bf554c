#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace czsum {

/// Malformed or inconsistent configuration (templates, backend specs,
/// cross-references, missing credentials). Raised before any work starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failures: unreadable inputs, unwritable outputs.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A backend rejected a request in a way retrying cannot fix (4xx other
/// than 408/429, malformed response body).
class RequestError : public std::runtime_error {
 public:
  RequestError(const std::string& what, int status)
      : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct Attempt {
  int status = 0;  // 0 when no HTTP response was received
  std::string detail;
};

/// Transient failures persisted past the retry budget. Carries one entry
/// per attempt made.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, std::vector<Attempt> attempts)
      : std::runtime_error(what), attempts_(std::move(attempts)) {}
  const std::vector<Attempt>& attempts() const noexcept { return attempts_; }

 private:
  std::vector<Attempt> attempts_;
};

/// Strict-mode loading found records that failed validation.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::size_t violations)
      : std::runtime_error(what), violations_(violations) {}
  std::size_t violations() const noexcept { return violations_; }

 private:
  std::size_t violations_;
};

}  // namespace czsum
